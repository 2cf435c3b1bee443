#pragma once

// JSON (de)serialization of multiple-access channel specs: either an
// explicit probability tensor or a named builtin family, plus optional
// per-sender cost constraints.

#include <cmath>
#include <cstddef>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dimac/channel.hpp"

namespace dimac {

struct ChannelSpecFile {
  KMac channel;
  std::optional<CostSpec> costs;
  std::optional<std::string> builtin;  // set when loaded from a named family
  std::optional<double> builtin_q;
};

namespace detail {

inline KMac builtin_channel(const std::string& name, std::optional<double> q) {
  if (name == "mod3_adder") {
    if (q) throw std::invalid_argument("channel spec: mod3_adder takes no parameter q");
    return make_mod3_adder();
  }
  double qq = q.value_or(0.1);
  if (name == "mod2_adder") return make_mod2_adder(qq);
  if (name == "multiplier") return make_multiplier(qq);
  throw std::invalid_argument("channel spec: unknown builtin '" + name + "'");
}

inline nlohmann::json tensor_to_json(const KMac& w) {
  // nested arrays, innermost axis = output letter
  std::function<nlohmann::json(std::size_t, std::size_t)> build =
      [&](std::size_t axis, std::size_t base) -> nlohmann::json {
    nlohmann::json arr = nlohmann::json::array();
    if (axis == w.in_sizes().size()) {
      for (std::size_t y = 0; y < w.out_size(); ++y) arr.push_back(w.tensor()[base + y]);
      return arr;
    }
    std::size_t stride = w.out_size();
    for (std::size_t a = axis + 1; a < w.in_sizes().size(); ++a) stride *= w.in_sizes()[a];
    for (std::size_t v = 0; v < w.in_sizes()[axis]; ++v)
      arr.push_back(build(axis + 1, base + v * stride));
    return arr;
  };
  return build(0, 0);
}

inline void flatten_tensor(const nlohmann::json& node, const std::vector<std::size_t>& in_sizes,
                           std::size_t out_size, std::size_t axis, std::vector<double>& out) {
  if (!node.is_array()) throw std::invalid_argument("channel spec: tensor must be nested arrays");
  if (axis == in_sizes.size()) {
    if (node.size() != out_size)
      throw std::invalid_argument("channel spec: tensor row length != out_size");
    for (const auto& v : node) {
      if (!v.is_number()) throw std::invalid_argument("channel spec: tensor entries must be numbers");
      out.push_back(v.get<double>());
    }
    return;
  }
  if (node.size() != in_sizes[axis])
    throw std::invalid_argument("channel spec: tensor extent mismatch on input axis");
  for (const auto& child : node) flatten_tensor(child, in_sizes, out_size, axis + 1, out);
}

}  // namespace detail

inline ChannelSpecFile parse_channel_spec(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("channel spec: top level must be an object");
  bool has_builtin = j.contains("builtin");
  bool has_tensor = j.contains("tensor");
  if (has_builtin == has_tensor)
    throw std::invalid_argument("channel spec: provide exactly one of 'builtin' or 'tensor'");

  ChannelSpecFile spec{KMac({2, 2}, 2, std::vector<double>(8, 0.5)), std::nullopt, std::nullopt,
                       std::nullopt};
  if (has_builtin) {
    std::string name = j.at("builtin").get<std::string>();
    std::optional<double> q;
    if (j.contains("q")) q = j.at("q").get<double>();
    spec.channel = detail::builtin_channel(name, q);
    spec.builtin = name;
    spec.builtin_q = q;
  } else {
    std::vector<std::size_t> in_sizes = j.at("in_sizes").get<std::vector<std::size_t>>();
    auto out_size = j.at("out_size").get<std::size_t>();
    if (j.contains("k") && j.at("k").get<std::size_t>() != in_sizes.size())
      throw std::invalid_argument("channel spec: field 'k' disagrees with in_sizes length");
    std::vector<double> flat;
    detail::flatten_tensor(j.at("tensor"), in_sizes, out_size, 0, flat);
    spec.channel = KMac(in_sizes, out_size, std::move(flat));
  }

  if (j.contains("costs")) {
    const auto& jc = j.at("costs");
    CostSpec costs;
    costs.phi = jc.at("phi").get<std::vector<std::vector<double>>>();
    if (jc.contains("cap")) {
      for (const auto& v : jc.at("cap")) {
        if (v.is_null())
          costs.cap.push_back(CostSpec::kUnbounded);
        else
          costs.cap.push_back(v.get<double>());
      }
    } else {
      costs.cap.assign(costs.phi.size(), CostSpec::kUnbounded);
    }
    costs.validate(spec.channel.in_sizes());
    spec.costs = std::move(costs);
  }
  return spec;
}

inline nlohmann::json channel_spec_to_json(const ChannelSpecFile& spec) {
  nlohmann::json j;
  j["k"] = spec.channel.in_sizes().size();
  j["in_sizes"] = spec.channel.in_sizes();
  j["out_size"] = spec.channel.out_size();
  if (spec.builtin) {
    j["builtin"] = *spec.builtin;
    if (spec.builtin_q) j["q"] = *spec.builtin_q;
  } else {
    j["tensor"] = detail::tensor_to_json(spec.channel);
  }
  if (spec.costs) {
    nlohmann::json jc;
    jc["phi"] = spec.costs->phi;
    nlohmann::json caps = nlohmann::json::array();
    for (double c : spec.costs->cap) {
      if (std::isinf(c))
        caps.push_back(nullptr);
      else
        caps.push_back(c);
    }
    jc["cap"] = caps;
    j["costs"] = jc;
  }
  return j;
}

inline ChannelSpecFile load_channel_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open channel spec: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("channel spec parse error in " + path + ": " + e.what());
  }
  return parse_channel_spec(j);
}

inline void save_channel_spec(const ChannelSpecFile& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write channel spec: " + path);
  out << channel_spec_to_json(spec).dump(2) << '\n';
}

}  // namespace dimac
