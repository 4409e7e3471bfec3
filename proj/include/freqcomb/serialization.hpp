#pragma once

#include <string>
#include <variant>

#include <json.hpp>

#include "freqcomb/circuit_synth.hpp"
#include "freqcomb/core_state.hpp"

namespace freqcomb {

using Json = nlohmann::json;

// Complex numbers are [re, im]; matrices are row-major nested arrays.
Json to_json(Complex z);
Complex complex_from_json(const Json& j);

Json to_json(const FrequencyComb& comb);
FrequencyComb comb_from_json(const Json& j);

Json to_json(const SinglePhotonState& state);
SinglePhotonState single_photon_from_json(const Json& j);

Json to_json(const BipartitePhotonState& state);
BipartitePhotonState bipartite_from_json(const Json& j);

Json to_json(const UnitaryMap& u);
UnitaryMap unitary_from_json(const Json& j);

// Netlist schema shared by both circuit kinds; the unused arrays are empty.
// Demux netlists also carry the comb so they can be re-verified.
using Netlist = std::variant<DemuxTree, InterferometerMesh>;

Json to_json(const DemuxTree& tree);
Json to_json(const InterferometerMesh& mesh);
Netlist netlist_from_json(const Json& j);

// Fixed "%.17g" rendering so identical runs produce identical bytes.
std::string format_double(double x);

// JSON text with every floating-point value rendered by format_double and a
// trailing newline. indent < 0 gives a single line.
std::string dump_json(const Json& j, int indent = 2);

}  // namespace freqcomb
