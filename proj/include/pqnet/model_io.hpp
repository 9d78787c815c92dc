#ifndef PQNET_MODEL_IO_HPP
#define PQNET_MODEL_IO_HPP

#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "pqnet/core_model.hpp"
#include "pqnet/errors.hpp"

namespace pqnet {

/// Malformed model file: unreadable, not JSON, or missing/mistyped keys.
/// `line` and `column` are 1-based when known, 0 otherwise.
class ModelParseError : public Error {
 public:
  ModelParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
      : Error(what), line_(line), column_(column) {}
  [[nodiscard]] std::size_t line() const noexcept { return line_; }
  [[nodiscard]] std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

namespace detail {

inline std::pair<std::size_t, std::size_t> line_col_of(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

template <typename T>
T required(const nlohmann::json& obj, const char* key) {
  if (!obj.contains(key)) throw ModelParseError(std::string("missing key \"") + key + "\"");
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ModelParseError(std::string("key \"") + key + "\" has the wrong type: " + e.what());
  }
}

}  // namespace detail

/// Reads the model JSON object `{"classes", "stations", "lambda", "nu", "mu"}`.
/// Shape checks are left to validate_model.
inline RawModel raw_model_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ModelParseError("model file must contain a JSON object");
  RawModel raw;
  raw.classes = detail::required<std::size_t>(j, "classes");
  raw.stations = detail::required<std::size_t>(j, "stations");
  raw.lambda = detail::required<std::vector<double>>(j, "lambda");
  raw.nu = detail::required<std::vector<double>>(j, "nu");
  raw.mu = detail::required<std::vector<std::vector<double>>>(j, "mu");
  return raw;
}

inline RawModel parse_raw_model(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // byte is one past the offending character
    const auto [line, col] = detail::line_col_of(text, e.byte == 0 ? 0 : e.byte - 1);
    std::ostringstream os;
    os << "line " << line << ", column " << col << ": " << e.what();
    throw ModelParseError(os.str(), line, col);
  }
  return raw_model_from_json(j);
}

inline NetworkModel parse_model(std::string_view text) { return validate_model(parse_raw_model(text)); }

inline NetworkModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelParseError("cannot open model file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_model(buf.str());
  } catch (const ModelParseError& e) {
    throw ModelParseError(path + ": " + e.what(), e.line(), e.column());
  }
}

inline nlohmann::json to_json(const NetworkModel& model) {
  const RawModel raw = model.to_raw();
  return nlohmann::json{{"classes", raw.classes},
                        {"stations", raw.stations},
                        {"lambda", raw.lambda},
                        {"nu", raw.nu},
                        {"mu", raw.mu}};
}

}  // namespace pqnet

#endif  // PQNET_MODEL_IO_HPP
