#include "bccf/io.hpp"

#include <fstream>
#include <sstream>

#include "detail_json.hpp"

namespace bccf {

namespace {

template <class T>
std::vector<T> field(const nlohmann::json& j, const char* name) {
  if (!j.contains(name)) throw ParseError(std::string("missing field \"") + name + "\"");
  const auto& v = j.at(name);
  if (!v.is_array()) throw ParseError(std::string("field \"") + name + "\" must be an array");
  try {
    return v.get<std::vector<T>>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError(std::string("field \"") + name + "\" has entries of the wrong type");
  }
}

}  // namespace

BccfProtocol protocol_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("parse: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("parse: protocol must be a JSON object");
  for (const char* dims : {"alice_dims", "bob_dims"})
    for (const auto& d : j.value(dims, nlohmann::json::array()))
      if (!d.is_number_unsigned() || d.get<std::size_t>() == 0)
        throw DimensionError(std::string("dimension: ") + dims + " entries must be positive integers");
  return BccfProtocol(field<std::size_t>(j, "alice_dims"), field<std::size_t>(j, "bob_dims"),
                      ProbDist(field<double>(j, "alpha0")), ProbDist(field<double>(j, "alpha1")),
                      ProbDist(field<double>(j, "beta0")), ProbDist(field<double>(j, "beta1")));
}

std::string protocol_to_json(const BccfProtocol& proto, int indent) {
  nlohmann::ordered_json j;
  j["alice_dims"] = proto.alice_dims();
  j["bob_dims"] = proto.bob_dims();
  auto vec = [](const ProbDist& d) { return std::vector<double>(d.values().begin(), d.values().end()); };
  j["alpha0"] = vec(proto.alpha(0));
  j["alpha1"] = vec(proto.alpha(1));
  j["beta0"] = vec(proto.beta(0));
  j["beta1"] = vec(proto.beta(1));
  return j.dump(indent);
}

BccfProtocol load_protocol(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return protocol_from_json(os.str());
}

void save_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

std::string quantum_result_json(const QuantumResult& r, int indent) {
  return detail::result_to_json(r).dump(indent);
}

BccfProtocol three_quarters_protocol() {
  return BccfProtocol({2}, {3}, ProbDist({1.0, 0.0}), ProbDist({1.0, 0.0}), ProbDist({0.5, 0.5, 0.0}),
                      ProbDist({0.5, 0.0, 0.5}));
}

}  // namespace bccf
