#include <cstdio>
int main() { std::puts("boxtune"); return 0; }
