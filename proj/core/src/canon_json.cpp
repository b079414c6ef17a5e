#include "canon_json.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace cognav::detail {

std::string format_double(double v) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument("non-finite number in document");
  }
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

namespace {

void write_value(const nlohmann::json& j, std::string& out, int depth) {
  const auto pad = [&out](int d) { out.append(static_cast<std::size_t>(d) * 2, ' '); };
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      std::size_t i = 0;
      for (auto it = j.begin(); it != j.end(); ++it, ++i) {
        pad(depth + 1);
        out += nlohmann::json(it.key()).dump();
        out += ": ";
        write_value(it.value(), out, depth + 1);
        if (i + 1 < j.size()) out += ',';
        out += '\n';
      }
      pad(depth);
      out += '}';
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        pad(depth + 1);
        write_value(j[i], out, depth + 1);
        if (i + 1 < j.size()) out += ',';
        out += '\n';
      }
      pad(depth);
      out += ']';
      return;
    }
    case nlohmann::json::value_t::string:
      out += j.dump();
      return;
    case nlohmann::json::value_t::boolean:
      out += j.get<bool>() ? "true" : "false";
      return;
    case nlohmann::json::value_t::number_integer: {
      char buf[24];
      std::snprintf(buf, sizeof(buf), "%" PRId64, j.get<std::int64_t>());
      out += buf;
      return;
    }
    case nlohmann::json::value_t::number_unsigned: {
      char buf[24];
      std::snprintf(buf, sizeof(buf), "%" PRIu64, j.get<std::uint64_t>());
      out += buf;
      return;
    }
    case nlohmann::json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += "null";
      return;
  }
}

}  // namespace

std::string canonical_dump(const nlohmann::json& j) {
  std::string out;
  write_value(j, out, 0);
  out += '\n';
  return out;
}

}  // namespace cognav::detail
