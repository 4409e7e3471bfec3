#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "freqcomb/bell.hpp"
#include "freqcomb/circuit_synth.hpp"
#include "freqcomb/measurement.hpp"
#include "freqcomb/sampling.hpp"
#include "freqcomb/serialization.hpp"

using namespace freqcomb;

namespace {

constexpr double kPs = 1e-12;

enum ExitCode { kOk = 0, kRuntimeFailure = 1, kPreconditionFailure = 2, kVerificationFailure = 3 };

struct VerificationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Sweep {
  std::optional<double> from;
  std::optional<double> to;
  std::size_t steps = 0;

  // Inclusive grid; a single step returns the start point.
  std::vector<double> grid(double default_from, double default_to, std::size_t default_steps) const {
    const double a = from.value_or(default_from);
    const double b = to.value_or(default_to);
    const std::size_t n = steps > 0 ? steps : default_steps;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return out;
  }
};

void add_sweep(CLI::App* cmd, Sweep& s, const std::string& what) {
  cmd->add_option("--sweep-from", s.from, "Start of the " + what + " sweep");
  cmd->add_option("--sweep-to", s.to, "End of the " + what + " sweep");
  cmd->add_option("--sweep-steps", s.steps, "Number of sweep points")->check(CLI::PositiveNumber);
}

// Data goes to --out or stdout. The human summary goes to stdout when data
// has its own file, otherwise to stderr so piped data stays clean.
class Output {
 public:
  explicit Output(const std::string& path) : path_(path) {}

  void write(const std::string& text) const {
    if (path_.empty()) {
      std::cout << text << std::flush;
      return;
    }
    write_file(path_, text);
  }

  std::ostream& summary() const { return path_.empty() ? std::cerr : std::cout; }

  static void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << text;
    if (!f.flush()) throw std::runtime_error("write to '" + path + "' failed");
  }

 private:
  std::string path_;
};

std::string csv_row(std::initializer_list<std::string> cells) {
  std::string row;
  for (const std::string& c : cells) {
    if (!row.empty()) row += ',';
    row += c;
  }
  return row + '\n';
}

std::string fd(double x) { return format_double(x); }

Json settings_json(const BellSettings& s) {
  return Json{{"t_a_s", s.t_a},
              {"t_a_prime_s", s.t_a_prime},
              {"t_b_s", s.t_b},
              {"t_b_prime_s", s.t_b_prime},
              {"response_time_s", s.response_time}};
}

Json read_json_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  std::stringstream buf;
  buf << f.rdbuf();
  try {
    return Json::parse(buf.str());
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument("'" + path + "' is not valid JSON: " + e.what());
  }
}

// ---- synth / demux-check -------------------------------------------------

struct SynthOptions {
  std::size_t modes = 0;
  double fsr_ghz = 1.0;
  std::string out;
};

void print_routing(std::ostream& os, const DemuxTree& tree, const RoutingMap& map) {
  os << "modes " << tree.comb.n_modes() << ", levels " << tree.levels << ", nodes " << tree.nodes.size() << '\n';
  for (std::size_t k = 0; k < map.port_of_mode.size(); ++k) {
    os << "mode " << k << " -> port " << map.port_of_mode[k] << '\n';
  }
  os << "leakage " << fd(map.leakage) << '\n';
  os << "min_routed " << fd(map.min_routed) << '\n';
}

int run_synth(const SynthOptions& o) {
  const DemuxTree tree = synthesize_demux(comb_from_ghz(o.modes, o.fsr_ghz));
  const RoutingMap map = verify_demux(tree);
  const Output out(o.out);
  out.write(dump_json(to_json(tree)));
  print_routing(out.summary(), tree, map);
  return kOk;
}

struct CheckOptions {
  std::string in;
  std::size_t modes = 0;
  double fsr_ghz = 1.0;
  std::string format = "json";
  std::string out;
};

int run_demux_check(const CheckOptions& o) {
  const DemuxTree tree = [&] {
    if (!o.in.empty()) {
      const Netlist net = netlist_from_json(read_json_file(o.in));
      if (!std::holds_alternative<DemuxTree>(net)) {
        throw std::invalid_argument("demux-check: '" + o.in + "' is not a demux_tree netlist");
      }
      return std::get<DemuxTree>(net);
    }
    if (o.modes >= 2) return synthesize_demux(comb_from_ghz(o.modes, o.fsr_ghz));
    throw std::invalid_argument("demux-check: give --in FILE or --modes N (N >= 2)");
  }();
  const RoutingMap map = verify_demux(tree);
  const Output out(o.out);
  if (o.format == "csv") {
    std::string text = csv_row({"mode", "frequency_rad_s", "port"});
    for (std::size_t k = 0; k < map.port_of_mode.size(); ++k) {
      text += csv_row({std::to_string(k), fd(tree.comb.mode_frequency(k)), std::to_string(map.port_of_mode[k])});
    }
    out.write(text);
  } else {
    out.write(dump_json(Json{{"n_modes", tree.comb.n_modes()},
                             {"port_of_mode", map.port_of_mode},
                             {"dropped_ports", tree.dropped_ports},
                             {"leakage", map.leakage},
                             {"min_routed", map.min_routed}}));
  }
  print_routing(out.summary(), tree, map);
  return kOk;
}

// ---- decompose -------------------------------------------------------------

struct DecomposeOptions {
  std::string in;
  std::string basis = "dft";
  std::size_t modes = 0;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int run_decompose(const DecomposeOptions& o) {
  ComplexMatrix u;
  if (!o.in.empty()) {
    const Json j = read_json_file(o.in);
    const UnitaryMap parsed = unitary_from_json(j);
    u = parsed.matrix();
  } else {
    if (o.modes < 1) throw std::invalid_argument("decompose: give --in FILE or --modes N");
    if (o.basis == "dft") {
      u = UnitaryMap::dft(o.modes).matrix();
    } else if (o.basis == "identity") {
      u = UnitaryMap::identity(o.modes).matrix();
    } else if (o.basis == "haar") {
      if (!o.seed) throw std::invalid_argument("decompose: --basis haar needs --seed");
      std::mt19937_64 rng(*o.seed);
      u = haar_random_unitary(o.modes, rng);
    } else {
      throw std::invalid_argument("decompose: --basis must be dft, identity or haar");
    }
  }
  const InterferometerMesh mesh = decompose_unitary(u);
  const double error = (reconstruct_mesh(mesh).matrix() - u).norm();
  const Output out(o.out);
  out.write(dump_json(to_json(mesh)));
  out.summary() << "modes " << mesh.n_modes << ", elements " << mesh.layers.size() << '\n'
                << "reconstruction_error " << fd(error) << '\n';
  if (!(error < 1e-9)) throw VerificationError("decompose: reconstruction error " + fd(error) + " exceeds 1e-9");
  return kOk;
}

// ---- fidelity --------------------------------------------------------------

struct FidelityOptions {
  std::string basis = "fourier";
  std::vector<std::size_t> modes{85};
  double fsr_ghz = 1.0;
  double jitter_ps = 3.0;
  Sweep sweep;  // response time, ps
  std::string format = "csv";
  std::string out;
};

int run_fidelity(const FidelityOptions& o) {
  const FidelityBasis basis = parse_fidelity_basis(o.basis);
  const FrequencyComb comb = comb_from_ghz(1, o.fsr_ghz);
  std::vector<double> times = o.sweep.grid(o.jitter_ps, o.jitter_ps, 1);
  for (double& t : times) {
    if (t < 0.0) throw std::invalid_argument("fidelity: response times must be >= 0");
    t *= kPs;
  }
  const std::vector<FidelityRow> rows = fidelity_sweep(basis, o.modes, times, comb);
  const Output out(o.out);
  if (o.format == "json") {
    Json arr = Json::array();
    for (const FidelityRow& r : rows) {
      arr.push_back(Json{{"n_modes", r.n_modes}, {"response_time_s", r.response_time}, {"fidelity", r.fidelity}});
    }
    out.write(dump_json(Json{{"basis", to_string(basis)}, {"fsr_ghz", o.fsr_ghz}, {"rows", arr}}));
  } else {
    std::string text = csv_row({"n_modes", "response_time_s", "fidelity"});
    for (const FidelityRow& r : rows) text += csv_row({std::to_string(r.n_modes), fd(r.response_time), fd(r.fidelity)});
    out.write(text);
  }
  double worst = 1.0;
  for (const FidelityRow& r : rows) worst = std::min(worst, r.fidelity);
  out.summary() << "basis " << to_string(basis) << ", rows " << rows.size() << ", min_fidelity " << fd(worst) << '\n';
  return kOk;
}

// ---- chsh ------------------------------------------------------------------

struct ChshOptions {
  std::string mode = "maximize";
  double fsr_ghz = 1.0;
  double jitter_ps = 3.0;
  Sweep sweep;  // sweep mode: t_b - t_a in ps; maximize mode: T in ps
  std::string format = "csv";
  std::string out;
};

int run_chsh(const ChshOptions& o) {
  const FrequencyComb comb = comb_from_ghz(2, o.fsr_ghz);
  const BipartitePhotonState bell = make_bell_state(comb);
  const double period_ps = comb.beat_period() / kPs;
  const Output out(o.out);

  if (o.mode == "sweep") {
    const double t_width = o.jitter_ps * kPs;
    const BellSettings rule = optimal_settings(comb, t_width);
    const double rot_b = rule.t_b_prime - rule.t_b;
    const std::vector<double> dts = o.sweep.grid(0.0, period_ps, 101);
    std::vector<double> values(dts.size());
    for (std::size_t i = 0; i < dts.size(); ++i) {
      const double dt = dts[i] * kPs;
      values[i] = chsh_s2(bell, BellSettings(0.0, rule.t_a_prime, dt, dt + rot_b, t_width));
    }
    if (o.format == "json") {
      Json arr = Json::array();
      for (std::size_t i = 0; i < dts.size(); ++i) {
        arr.push_back(Json{{"dt_ab_s", dts[i] * kPs}, {"response_time_s", t_width}, {"s2", values[i]}});
      }
      out.write(dump_json(Json{{"fsr_ghz", o.fsr_ghz},
                               {"t_a_prime_minus_t_a_s", rule.t_a_prime},
                               {"t_b_prime_minus_t_b_s", rot_b},
                               {"rows", arr}}));
    } else {
      std::string text = csv_row({"dt_ab_s", "response_time_s", "s2"});
      for (std::size_t i = 0; i < dts.size(); ++i) text += csv_row({fd(dts[i] * kPs), fd(t_width), fd(values[i])});
      out.write(text);
    }
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    out.summary() << "s2_min " << fd(*lo) << ", s2_max " << fd(*hi) << ", bound " << fd(chsh_s2_bound(comb.delta_omega(), t_width))
                  << '\n';
    return kOk;
  }
  if (o.mode != "maximize") throw std::invalid_argument("chsh: --mode must be sweep or maximize");

  const std::vector<double> ts = o.sweep.grid(0.0, period_ps, 50);
  std::vector<double> values(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (ts[i] < 0.0) throw std::invalid_argument("chsh: response times must be >= 0");
    values[i] = maximize_s2(bell, ts[i] * kPs).value;
  }
  const double t0 = chsh_threshold_response_time(comb.delta_omega());
  const double crossing = locate_classical_crossing(bell, 0.0, 0.5 * comb.beat_period());
  if (o.format == "json") {
    Json arr = Json::array();
    for (std::size_t i = 0; i < ts.size(); ++i) arr.push_back(Json{{"response_time_s", ts[i] * kPs}, {"s2_max", values[i]}});
    out.write(dump_json(Json{{"fsr_ghz", o.fsr_ghz},
                             {"threshold_response_time_s", t0},
                             {"searched_crossing_s", crossing},
                             {"rows", arr}}));
  } else {
    std::string text = "# threshold_response_time_s=" + fd(t0) + " searched_crossing_s=" + fd(crossing) + '\n';
    text += csv_row({"response_time_s", "s2_max"});
    for (std::size_t i = 0; i < ts.size(); ++i) text += csv_row({fd(ts[i] * kPs), fd(values[i])});
    out.write(text);
  }
  out.summary() << "s2_max(T=" << fd(ts.front() * kPs) << ") " << fd(values.front()) << '\n'
                << "threshold_response_time_s " << fd(t0) << " (" << fd(t0 / comb.beat_period()) << " periods)\n"
                << "searched_crossing_s " << fd(crossing) << '\n';
  return kOk;
}

// ---- cglmp -----------------------------------------------------------------

struct CglmpOptions {
  std::size_t modes = 3;
  double fsr_ghz = 1.0;
  double jitter_ps = 3.0;
  bool search = false;
  std::string format = "json";
  std::string out;
};

int run_cglmp(const CglmpOptions& o) {
  const FrequencyComb comb = comb_from_ghz(o.modes, o.fsr_ghz);
  const BipartitePhotonState bell = make_bell_state(comb);
  const double t_width = o.jitter_ps * kPs;
  struct Entry {
    std::string label;
    BellSettings settings;
    double value;
  };
  std::vector<Entry> entries;
  const BellSettings rule = optimal_settings(comb, t_width);
  const BellSettings mirrored = mirrored_settings(comb, t_width);
  entries.push_back({"rule", rule, s_n(bell, rule)});
  entries.push_back({"mirrored", mirrored, s_n(bell, mirrored)});
  if (o.search) {
    const SearchResult r = maximize_s_n(bell, t_width);
    entries.push_back({"search", r.settings, r.value});
  }
  const Output out(o.out);
  if (o.format == "csv") {
    std::string text = csv_row({"label", "t_a_s", "t_a_prime_s", "t_b_s", "t_b_prime_s", "response_time_s", "s_n"});
    for (const Entry& e : entries) {
      const BellSettings& s = e.settings;
      text += csv_row({e.label, fd(s.t_a), fd(s.t_a_prime), fd(s.t_b), fd(s.t_b_prime), fd(s.response_time), fd(e.value)});
    }
    out.write(text);
  } else {
    Json report{{"n_modes", o.modes}, {"fsr_ghz", o.fsr_ghz}, {"response_time_s", t_width}};
    for (const Entry& e : entries) report[e.label] = Json{{"settings", settings_json(e.settings)}, {"s_n", e.value}};
    out.write(dump_json(report));
  }
  for (const Entry& e : entries) out.summary() << e.label << " s_n " << fd(e.value) << '\n';
  return kOk;
}

// ---- sample ----------------------------------------------------------------

struct SampleOptions {
  std::uint64_t seed = 0;
  std::size_t modes = 2;
  std::size_t events = 100000;
  double fsr_ghz = 1.0;
  double jitter_ps = 3.0;
  double t_a_ps = 0.0;
  double t_b_ps = 0.0;
  double eta_a = 1.0;
  double eta_b = 1.0;
  bool chsh = false;
  std::string out;
};

std::string event_log(const std::vector<CoincidenceEvent>& events, const SampleOptions& o, double t_a, double t_b,
                      std::uint64_t seed) {
  std::string text = "# seed=" + std::to_string(seed) + " n_modes=" + std::to_string(o.modes) +
                     " fsr_ghz=" + fd(o.fsr_ghz) + " t_a_s=" + fd(t_a) + " t_b_s=" + fd(t_b) +
                     " response_time_s=" + fd(o.jitter_ps * kPs) + " eta_a=" + fd(o.eta_a) + " eta_b=" + fd(o.eta_b) +
                     '\n';
  text += csv_row({"event_id", "jitter_a_s", "jitter_b_s", "port_a", "port_b", "kept"});
  for (const CoincidenceEvent& ev : events) {
    text += csv_row({std::to_string(ev.id), fd(ev.jitter_a), fd(ev.jitter_b), std::to_string(ev.port_a),
                     std::to_string(ev.port_b), ev.kept ? "1" : "0"});
  }
  return text;
}

void print_tally(std::ostream& os, const EmpiricalCoincidences& emp, const Eigen::MatrixXd& analytic,
                 std::size_t n_events) {
  os << "kept " << emp.kept << " of " << n_events << '\n';
  for (Eigen::Index i = 0; i < analytic.rows(); ++i) {
    for (Eigen::Index j = 0; j < analytic.cols(); ++j) {
      os << "C[" << i << "][" << j << "] " << fd(emp.frequencies(i, j)) << " +- " << fd(emp.std_errors(i, j))
         << " (analytic " << fd(analytic(i, j)) << ")\n";
    }
  }
  if (analytic.rows() == 2) os << "E " << fd(emp.correlation) << " +- " << fd(emp.correlation_error) << '\n';
}

int run_sample(const SampleOptions& o) {
  const FrequencyComb comb = comb_from_ghz(o.modes, o.fsr_ghz);
  const BipartitePhotonState bell = make_bell_state(comb);
  const double t_width = o.jitter_ps * kPs;

  if (!o.chsh) {
    const double t_a = o.t_a_ps * kPs;
    const double t_b = o.t_b_ps * kPs;
    const auto events = sample_coincidence_events(bell, t_a, t_b, t_width, {o.events, o.seed, o.eta_a, o.eta_b});
    const Output out(o.out);
    out.write(event_log(events, o, t_a, t_b, o.seed));
    Eigen::MatrixXd analytic = coincidence_table(bell, t_a, t_b, t_width);
    analytic /= analytic.sum();
    print_tally(out.summary(), tally_events(events, o.modes), analytic, o.events);
    return kOk;
  }

  if (o.modes != 2) throw std::invalid_argument("sample --chsh requires --modes 2");
  if (o.out.empty()) throw std::invalid_argument("sample --chsh writes four logs and needs --out PREFIX");
  const BellSettings s = optimal_settings(comb, t_width);
  struct Pair {
    const char* tag;
    double t_a, t_b, sign;
  };
  const Pair pairs[] = {{"ab", s.t_a, s.t_b, 1.0},
                        {"abp", s.t_a, s.t_b_prime, -1.0},
                        {"apb", s.t_a_prime, s.t_b, 1.0},
                        {"apbp", s.t_a_prime, s.t_b_prime, 1.0}};
  const CounterRng seeds(o.seed);
  double s2 = 0.0;
  double var = 0.0;
  std::uint64_t index = 0;
  for (const Pair& p : pairs) {
    const std::uint64_t seed = seeds.bits(index++, 0);
    const auto events = sample_coincidence_events(bell, p.t_a, p.t_b, t_width, {o.events, seed, o.eta_a, o.eta_b});
    Output::write_file(o.out + "_" + p.tag + ".csv", event_log(events, o, p.t_a, p.t_b, seed));
    const EmpiricalCoincidences emp = tally_events(events, 2);
    std::cout << "pair " << p.tag << '\n';
    print_tally(std::cout, emp, chsh_coincidences(bell, p.t_a, p.t_b, t_width), o.events);
    s2 += p.sign * emp.correlation;
    var += emp.correlation_error * emp.correlation_error;
  }
  std::cout << "S2 " << fd(s2) << " +- " << fd(std::sqrt(var)) << " (analytic " << fd(chsh_s2(bell, s)) << ")\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frequency-comb qudit circuit synthesis and Bell-test simulation"};
  app.require_subcommand(1);
  const auto format_check = CLI::IsMember({"csv", "json"});

  SynthOptions synth;
  auto* c_synth = app.add_subcommand("synth", "Synthesize the frequency demultiplexer tree");
  c_synth->add_option("--modes", synth.modes, "Number of comb lines N")->required()->check(CLI::Range(2, 1 << 20));
  c_synth->add_option("--fsr-ghz", synth.fsr_ghz, "Free spectral range in GHz")->check(CLI::PositiveNumber);
  c_synth->add_option("--out", synth.out, "Netlist JSON path (default stdout)");

  CheckOptions check;
  auto* c_check = app.add_subcommand("demux-check", "Verify the routing of a demultiplexer netlist");
  c_check->add_option("--in", check.in, "Netlist JSON written by synth")->check(CLI::ExistingFile);
  c_check->add_option("--modes", check.modes, "Synthesize and check N lines instead of reading --in")
      ->check(CLI::Range(2, 1 << 20));
  c_check->add_option("--fsr-ghz", check.fsr_ghz, "Free spectral range in GHz")->check(CLI::PositiveNumber);
  c_check->add_option("--format", check.format, "csv or json")->check(format_check);
  c_check->add_option("--out", check.out, "Report path (default stdout)");

  DecomposeOptions decompose;
  auto* c_dec = app.add_subcommand("decompose", "Decompose a unitary into a rectangular MZI mesh");
  c_dec->add_option("--in", decompose.in, "Unitary JSON ({\"matrix\": [[[re, im], ...], ...]})")
      ->check(CLI::ExistingFile);
  c_dec->add_option("--basis", decompose.basis, "Built-in unitary when no --in: dft, identity or haar")
      ->check(CLI::IsMember({"dft", "identity", "haar"}));
  c_dec->add_option("--modes", decompose.modes, "Dimension of the built-in unitary")->check(CLI::Range(1, 4096));
  c_dec->add_option("--seed", decompose.seed, "Seed for --basis haar");
  c_dec->add_option("--out", decompose.out, "Mesh netlist JSON path (default stdout)");

  FidelityOptions fid;
  auto* c_fid = app.add_subcommand("fidelity", "Projection fidelity versus dimension and response time");
  c_fid->add_option("--basis", fid.basis, "pair, fourier or computational")
      ->check(CLI::IsMember({"pair", "fourier", "computational"}));
  c_fid->add_option("--modes", fid.modes, "Comma-separated list of N")->delimiter(',')->check(CLI::Range(1, 1 << 16));
  c_fid->add_option("--fsr-ghz", fid.fsr_ghz, "Free spectral range in GHz")->check(CLI::PositiveNumber);
  c_fid->add_option("--jitter-ps", fid.jitter_ps, "Response time T in ps when no sweep is given")
      ->check(CLI::NonNegativeNumber);
  add_sweep(c_fid, fid.sweep, "response time (ps)");
  c_fid->add_option("--format", fid.format, "csv or json")->check(format_check);
  c_fid->add_option("--out", fid.out, "Output path (default stdout)");

  ChshOptions chsh;
  auto* c_chsh = app.add_subcommand("chsh", "Two-mode CHSH sweeps");
  c_chsh->add_option("--mode", chsh.mode, "sweep: S2 vs t_b - t_a; maximize: max S2 vs T")
      ->check(CLI::IsMember({"sweep", "maximize"}));
  c_chsh->add_option("--fsr-ghz", chsh.fsr_ghz, "Free spectral range in GHz")->check(CLI::PositiveNumber);
  c_chsh->add_option("--jitter-ps", chsh.jitter_ps, "Response time T in ps for sweep mode")
      ->check(CLI::NonNegativeNumber);
  add_sweep(c_chsh, chsh.sweep, "t_b - t_a (sweep) or T (maximize), in ps,");
  c_chsh->add_option("--format", chsh.format, "csv or json")->check(format_check);
  c_chsh->add_option("--out", chsh.out, "Output path (default stdout)");

  CglmpOptions cglmp;
  auto* c_cglmp = app.add_subcommand("cglmp", "High-dimensional indicator S_N for the comb Bell state");
  c_cglmp->add_option("--modes", cglmp.modes, "Number of comb lines N")->check(CLI::Range(2, 64));
  c_cglmp->add_option("--fsr-ghz", cglmp.fsr_ghz, "Free spectral range in GHz")->check(CLI::PositiveNumber);
  c_cglmp->add_option("--jitter-ps", cglmp.jitter_ps, "Response time T in ps")->check(CLI::NonNegativeNumber);
  c_cglmp->add_flag("--search", cglmp.search, "Also report the searched maximum");
  c_cglmp->add_option("--format", cglmp.format, "csv or json")->check(format_check);
  c_cglmp->add_option("--out", cglmp.out, "Report path (default stdout)");

  SampleOptions sample;
  auto* c_sample = app.add_subcommand("sample", "Monte Carlo coincidence event log");
  c_sample->add_option("--seed", sample.seed, "Random seed")->required();
  c_sample->add_option("--modes", sample.modes, "Number of comb lines N")->check(CLI::Range(1, 64));
  c_sample->add_option("--events", sample.events, "Number of events")->check(CLI::PositiveNumber);
  c_sample->add_option("--fsr-ghz", sample.fsr_ghz, "Free spectral range in GHz")->check(CLI::PositiveNumber);
  c_sample->add_option("--jitter-ps", sample.jitter_ps, "Response time T in ps")->check(CLI::NonNegativeNumber);
  c_sample->add_option("--t-a-ps", sample.t_a_ps, "Detection time of party a in ps");
  c_sample->add_option("--t-b-ps", sample.t_b_ps, "Detection time of party b in ps");
  c_sample->add_option("--eta-a", sample.eta_a, "Detector efficiency of party a")->check(CLI::Range(0.0, 1.0));
  c_sample->add_option("--eta-b", sample.eta_b, "Detector efficiency of party b")->check(CLI::Range(0.0, 1.0));
  c_sample->add_flag("--chsh", sample.chsh, "Sample all four rule-setting pairs into PREFIX_{ab,abp,apb,apbp}.csv");
  c_sample->add_option("--out", sample.out, "Event log path, or file prefix with --chsh");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*c_synth) return run_synth(synth);
    if (*c_check) return run_demux_check(check);
    if (*c_dec) return run_decompose(decompose);
    if (*c_fid) return run_fidelity(fid);
    if (*c_chsh) return run_chsh(chsh);
    if (*c_cglmp) return run_cglmp(cglmp);
    if (*c_sample) return run_sample(sample);
  } catch (const RoutingError& e) {
    std::cerr << "verification failed: " << e.what() << '\n';
    return kVerificationFailure;
  } catch (const VerificationError& e) {
    std::cerr << "verification failed: " << e.what() << '\n';
    return kVerificationFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kPreconditionFailure;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kPreconditionFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }
  return kRuntimeFailure;
}
