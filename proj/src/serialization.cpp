#include "freqcomb/serialization.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace freqcomb {
namespace {

Json vector_to_json(const ComplexVector& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(to_json(v(i)));
  return arr;
}

ComplexVector vector_from_json(const Json& j) {
  if (!j.is_array()) throw std::invalid_argument("expected a JSON array of complex numbers");
  ComplexVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
  return v;
}

Json matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(vector_to_json(m.row(r).transpose()));
  return rows;
}

ComplexMatrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("expected a non-empty JSON matrix");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  ComplexMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const ComplexVector row = vector_from_json(j[static_cast<std::size_t>(r)]);
    if (row.size() != cols) throw std::invalid_argument("ragged JSON matrix");
    m.row(r) = row.transpose();
  }
  return m;
}

}  // namespace

Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("complex number must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

Json to_json(const FrequencyComb& comb) {
  return Json{{"omega0_rad_s", comb.omega0()},
              {"delta_omega_rad_s", comb.delta_omega()},
              {"n_modes", comb.n_modes()}};
}

FrequencyComb comb_from_json(const Json& j) {
  return FrequencyComb(j.at("omega0_rad_s").get<double>(), j.at("delta_omega_rad_s").get<double>(),
                       j.at("n_modes").get<std::size_t>());
}

Json to_json(const SinglePhotonState& state) {
  return Json{{"comb", to_json(state.comb())}, {"amplitudes", vector_to_json(state.amplitudes())}};
}

SinglePhotonState single_photon_from_json(const Json& j) {
  return SinglePhotonState(comb_from_json(j.at("comb")), vector_from_json(j.at("amplitudes")));
}

Json to_json(const BipartitePhotonState& state) {
  return Json{{"comb", to_json(state.comb())}, {"amplitudes", matrix_to_json(state.amplitudes())}};
}

BipartitePhotonState bipartite_from_json(const Json& j) {
  return BipartitePhotonState(comb_from_json(j.at("comb")), matrix_from_json(j.at("amplitudes")));
}

Json to_json(const UnitaryMap& u) { return Json{{"matrix", matrix_to_json(u.matrix())}}; }

UnitaryMap unitary_from_json(const Json& j) { return UnitaryMap(matrix_from_json(j.at("matrix"))); }

Json to_json(const DemuxTree& tree) {
  Json nodes = Json::array();
  for (const MziNode& n : tree.nodes) {
    nodes.push_back(Json{{"level", n.level}, {"position", n.position}, {"delay_s", n.delay}, {"trim_rad", n.trim_phase}});
  }
  return Json{{"kind", "demux_tree"},
              {"n_modes", tree.comb.n_modes()},
              {"comb", to_json(tree.comb)},
              {"nodes", nodes},
              {"layers", Json::array()},
              {"output_phases_rad", Json::array()},
              {"dropped_ports", tree.dropped_ports}};
}

Json to_json(const InterferometerMesh& mesh) {
  Json layers = Json::array();
  for (const MeshElement& e : mesh.layers) {
    layers.push_back(Json{{"p", e.p}, {"theta_rad", e.theta}, {"phi_rad", e.phi}});
  }
  return Json{{"kind", "mesh"},
              {"n_modes", mesh.n_modes},
              {"nodes", Json::array()},
              {"layers", layers},
              {"output_phases_rad", mesh.output_phases},
              {"dropped_ports", Json::array()}};
}

Netlist netlist_from_json(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const auto n_modes = j.at("n_modes").get<std::size_t>();
  if (kind == "demux_tree") {
    DemuxTree tree{comb_from_json(j.at("comb")), 0, {}, j.at("dropped_ports").get<std::vector<std::size_t>>()};
    if (tree.comb.n_modes() != n_modes) throw std::invalid_argument("netlist: n_modes disagrees with comb");
    for (const Json& n : j.at("nodes")) {
      MziNode node{n.at("delay_s").get<double>(), n.at("trim_rad").get<double>(), n.at("level").get<int>(),
                   n.at("position").get<std::size_t>()};
      if (node.delay < 0.0) throw std::invalid_argument("netlist: negative MZI delay");
      tree.levels = std::max(tree.levels, node.level);
      tree.nodes.push_back(node);
    }
    std::sort(tree.nodes.begin(), tree.nodes.end(), [](const MziNode& x, const MziNode& y) {
      return x.level != y.level ? x.level < y.level : x.position < y.position;
    });
    if (tree.nodes.size() != (std::size_t{1} << tree.levels) - 1) {
      throw std::invalid_argument("netlist: node count does not match level count");
    }
    return tree;
  }
  if (kind == "mesh") {
    InterferometerMesh mesh{n_modes, {}, j.at("output_phases_rad").get<std::vector<double>>()};
    for (const Json& e : j.at("layers")) {
      mesh.layers.push_back(
          MeshElement{e.at("p").get<std::size_t>(), e.at("theta_rad").get<double>(), e.at("phi_rad").get<double>()});
    }
    return mesh;
  }
  throw std::invalid_argument("netlist: unknown kind '" + kind + "'");
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

void write_json(std::string& out, const Json& j, int indent, int depth) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += Json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        write_json(out, it.value(), indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Short numeric arrays such as [re, im] stay on one line.
      const bool flat = j.size() <= 4 && std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i > 0) out += flat && indent >= 0 ? ", " : ",";
        if (!flat) newline(depth + 1);
        write_json(out, j[i], indent, depth + 1);
      }
      if (!flat) newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::number_float: {
      const double x = j.get<double>();
      out += std::isfinite(x) ? format_double(x) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_json(const Json& j, int indent) {
  std::string out;
  write_json(out, j, indent, 0);
  out += '\n';
  return out;
}

}  // namespace freqcomb
