#include "boxtune/wire.hpp"

#include <json.hpp>

namespace boxtune {

namespace {
using nlohmann::json;

json parse_document(const std::string& body) {
  json doc = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw ProtocolError("wire: body is not a JSON object");
  }
  return doc;
}

}  // namespace

std::string request_to_wire(const OracleRequest& request) {
  json doc;
  doc["version"] = 1;
  json prompts = json::array();
  for (const Eigen::VectorXd& p : request.prompts) {
    json row = json::array();
    for (int i = 0; i < p.size(); ++i) row.push_back(p(i));
    prompts.push_back(std::move(row));
  }
  doc["prompts"] = std::move(prompts);
  json batch = json::array();
  for (const BatchItem& item : request.batch) {
    json e;
    e["tokens"] = item.tokens;
    e["mask"] = item.mask_pos;
    e["label"] = item.label_token;
    batch.push_back(std::move(e));
  }
  doc["batch"] = std::move(batch);
  doc["id"] = request.request_id;
  return doc.dump();
}

OracleRequest request_from_wire(const std::string& body) {
  const json doc = parse_document(body);
  try {
    if (doc.at("version").get<int>() != 1) {
      throw ProtocolError("wire: unsupported version");
    }
    OracleRequest request;
    for (const json& row : doc.at("prompts")) {
      Eigen::VectorXd p(row.size());
      int i = 0;
      for (const json& v : row) p(i++) = v.get<double>();
      request.prompts.push_back(std::move(p));
    }
    for (const json& e : doc.at("batch")) {
      BatchItem item;
      item.tokens = e.at("tokens").get<std::vector<int>>();
      item.mask_pos = e.at("mask").get<int>();
      item.label_token = e.at("label").get<int>();
      request.batch.push_back(std::move(item));
    }
    if (doc.contains("id")) request.request_id = doc["id"].get<std::uint64_t>();
    return request;
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("wire: malformed request: ") + e.what());
  }
}

std::string response_to_wire(const OracleResponse& response) {
  json doc;
  json probs = json::array();
  for (const Eigen::VectorXd& p : response.mask_probs) {
    json row = json::array();
    for (int i = 0; i < p.size(); ++i) row.push_back(p(i));
    probs.push_back(std::move(row));
  }
  doc["probs"] = std::move(probs);
  doc["loss"] = response.loss;
  doc["calls"] = response.calls;
  return doc.dump();
}

OracleResponse response_from_wire(const std::string& body) {
  const json doc = parse_document(body);
  try {
    OracleResponse response;
    for (const json& row : doc.at("probs")) {
      Eigen::VectorXd p(row.size());
      int i = 0;
      for (const json& v : row) p(i++) = v.get<double>();
      response.mask_probs.push_back(std::move(p));
    }
    response.loss = doc.at("loss").get<double>();
    if (doc.contains("calls")) response.calls = doc["calls"].get<std::int64_t>();
    return response;
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("wire: malformed response: ") + e.what());
  }
}

}  // namespace boxtune
