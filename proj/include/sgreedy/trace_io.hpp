#pragma once

// RunTrace <-> JSON. Output is written by hand so every real carries 17
// significant digits; input goes through nlohmann::json.

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "sgreedy/greedy.hpp"

namespace sgreedy {

inline std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline std::string json_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out + "\"";
}

template <class Seq, class F>
void write_array(std::ostream& os, const Seq& seq, F&& each) {
  os << '[';
  bool first = true;
  for (const auto& v : seq) {
    if (!first) os << ',';
    first = false;
    each(v);
  }
  os << ']';
}

}  // namespace detail

inline void write_config_json(std::ostream& os, const GreedyConfig& c) {
  os << "{\"variant\":" << detail::json_quote(to_string(c.variant)) << ",\"s\":" << c.s << ",\"tau\":";
  detail::write_array(os, c.tau.values(), [&](double t) { os << fmt17(t); });
  os << ",\"tau_constant\":" << (c.tau.declared_constant() ? "true" : "false");
  os << ",\"max_iter\":";
  if (c.max_iter) os << *c.max_iter;
  else os << "null";
  os << ",\"residual_tol\":" << fmt17(c.residual_tol) << ",\"reg_tol\":" << fmt17(c.reg_tol)
     << ",\"selection_policy\":" << detail::json_quote(to_string(c.policy))
     << ",\"projection\":" << detail::json_quote(to_string(c.projection))
     << ",\"allow_reselect\":" << (c.allow_reselect ? "true" : "false") << '}';
}

inline void write_trace_json(std::ostream& os, const RunTrace& t) {
  os << "{\"config\":";
  write_config_json(os, t.config);
  os << ",\"dictionary_id\":" << detail::json_quote(t.dictionary_id);
  os << ",\"initial_norm\":" << fmt17(t.initial_norm);
  os << ",\"halt_reason\":" << detail::json_quote(to_string(t.halt_reason));
  os << ",\"records\":";
  detail::write_array(os, t.records, [&](const IterationRecord& r) {
    os << "{\"m\":" << r.m << ",\"selected\":";
    detail::write_array(os, r.selected, [&](std::size_t i) { os << i; });
    os << ",\"s_m\":" << r.s_m << ",\"residual_norm_before\":" << fmt17(r.residual_norm_before)
       << ",\"residual_norm_after\":" << fmt17(r.residual_norm_after)
       << ",\"projection_norm\":" << fmt17(r.projection_norm) << ",\"halt_reason\":";
    if (r.halt_reason) os << detail::json_quote(to_string(*r.halt_reason));
    else os << "null";
    os << '}';
  });
  os << ",\"approximant\":";
  detail::write_array(os, t.approximant, [&](const auto& kv) {
    os << "{\"index\":" << kv.first << ",\"coeff\":" << fmt17(kv.second) << '}';
  });
  os << ",\"final_residual\":";
  detail::write_array(os, t.final_residual.vec(), [&](double v) { os << fmt17(v); });
  os << "}\n";
}

inline std::string trace_to_json(const RunTrace& t) {
  std::ostringstream os;
  write_trace_json(os, t);
  return os.str();
}

inline RunTrace trace_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("trace json: ") + e.what());
  }
  try {
    RunTrace t;
    const auto& c = j.at("config");
    t.config.variant = parse_variant(c.at("variant").get<std::string>());
    t.config.s = c.at("s").get<std::size_t>();
    auto tau = c.at("tau").get<std::vector<double>>();
    t.config.tau = c.at("tau_constant").get<bool>() ? Weakness::constant(tau.at(0)) : Weakness::sequence(tau);
    if (!c.at("max_iter").is_null()) t.config.max_iter = c.at("max_iter").get<std::size_t>();
    t.config.residual_tol = c.at("residual_tol").get<double>();
    t.config.reg_tol = c.at("reg_tol").get<double>();
    t.config.policy = parse_policy(c.at("selection_policy").get<std::string>());
    t.config.projection = parse_projection(c.at("projection").get<std::string>());
    t.config.allow_reselect = c.at("allow_reselect").get<bool>();

    t.dictionary_id = j.at("dictionary_id").get<std::string>();
    t.initial_norm = j.at("initial_norm").get<double>();
    t.halt_reason = parse_halt_reason(j.at("halt_reason").get<std::string>());
    for (const auto& r : j.at("records")) {
      IterationRecord rec;
      rec.m = r.at("m").get<std::size_t>();
      rec.selected = r.at("selected").get<std::vector<std::size_t>>();
      rec.s_m = r.at("s_m").get<std::size_t>();
      rec.residual_norm_before = r.at("residual_norm_before").get<double>();
      rec.residual_norm_after = r.at("residual_norm_after").get<double>();
      rec.projection_norm = r.at("projection_norm").get<double>();
      if (!r.at("halt_reason").is_null()) rec.halt_reason = parse_halt_reason(r.at("halt_reason").get<std::string>());
      t.records.push_back(std::move(rec));
    }
    for (const auto& kv : j.at("approximant")) t.approximant[kv.at("index").get<std::size_t>()] = kv.at("coeff").get<double>();
    t.final_residual = Point(j.at("final_residual").get<std::vector<double>>());
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("trace json: ") + e.what());
  }
}

}  // namespace sgreedy
