#include "blackstock/io.hpp"

#include <fmt/format.h>

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace blackstock {

using nlohmann::json;

void write_series_csv(std::ostream& out, const TimeSeries& series) {
  out << kSeriesHeader << '\n';
  for (const auto& s : series.samples) {
    out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n",
                       s.t, s.E, s.E1, s.E2, s.F1, s.F2, s.F3, s.L, s.D_cum, s.w_ptt, s.w_lap_vt);
  }
}

void write_series_csv(const std::filesystem::path& path, const TimeSeries& series) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_series_csv(out, series);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

TimeSeries read_series_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read series " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kSeriesHeader) {
    throw std::runtime_error(path.string() + ": header does not match " + std::string(kSeriesHeader));
  }
  TimeSeries series;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::array<double, 11> v{};
    std::stringstream ss(line);
    std::string cell;
    std::size_t n = 0;
    while (std::getline(ss, cell, ',')) {
      if (n == v.size()) break;
      try {
        v[n++] = std::stod(cell);
      } catch (const std::exception&) {
        throw std::runtime_error(path.string() + ": bad number on row " + std::to_string(row));
      }
    }
    if (n != v.size() || ss.rdbuf()->in_avail() > 0) {
      throw std::runtime_error(path.string() + ": row " + std::to_string(row) + " does not have 11 columns");
    }
    EnergySample s;
    s.t = v[0];
    s.E = v[1];
    s.E1 = v[2];
    s.E2 = v[3];
    s.F1 = v[4];
    s.F2 = v[5];
    s.F3 = v[6];
    s.L = v[7];
    s.D_cum = v[8];
    s.w_ptt = v[9];
    s.w_lap_vt = v[10];
    series.times.push_back(s.t);
    series.samples.push_back(s);
  }
  if (!series.samples.empty()) series.termination_time = series.samples.back().t;
  return series;
}

namespace {

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

json summary_json(const TimeSeries& series) {
  json j;
  j["termination"] = to_string(series.termination);
  j["termination_time"] = series.termination_time;
  if (!series.completed()) j["message"] = series.message;
  j["samples"] = series.samples.size();
  if (!series.samples.empty()) {
    const auto& first = series.samples.front();
    const auto& last = series.samples.back();
    j["initial"] = {{"t", first.t}, {"E", first.E}, {"L", first.L}};
    j["final"] = {{"t", last.t}, {"E", last.E}, {"E1", last.E1}, {"E2", last.E2}, {"L", last.L},
                  {"D_cum", last.D_cum}};
  }
  if (!series.picard_iterations.empty()) {
    int worst = 0;
    for (int it : series.picard_iterations) worst = std::max(worst, it);
    j["picard_max_iterations"] = worst;
  }
  return j;
}

json to_json(const DecayFit& fit) {
  return {{"zeta", fit.zeta},
          {"window", {fit.t_start, fit.t_end}},
          {"r_squared", finite_or_null(fit.r_squared)},
          {"prefactor", finite_or_null(fit.prefactor)},
          {"points", fit.points},
          {"classification", to_string(fit.classification)}};
}

json to_json(const ThresholdReport& report) {
  json runs = json::array();
  for (const auto& r : report.runs) {
    runs.push_back({{"amplitude", r.amplitude},
                    {"classification", to_string(r.classification)},
                    {"zeta", r.zeta},
                    {"termination_time", r.termination_time}});
  }
  return {{"medium", {{"c", report.params.c}, {"b", report.params.b}, {"k", report.params.k},
                      {"sigma", report.params.sigma}}},
          {"modes", report.modes},
          {"amplitude_lo", report.amplitude_lo},
          {"amplitude_hi", report.amplitude_hi},
          {"delta_star", report.delta_star},
          {"data_norm_at_delta_star", report.data_norm_at_delta_star},
          {"runs", runs}};
}

json to_json(const RegularityStudy& study) {
  json rows = json::array();
  for (const auto& r : study.rows) {
    rows.push_back({{"N", r.modes},
                    {"initial_lap_psi1", r.initial_lap},
                    {"M_unweighted", r.sup_unweighted},
                    {"M_weighted", r.sup_weighted},
                    {"argmax_weighted", r.argmax_weighted}});
  }
  return {{"rows", rows},
          {"unweighted_growth", study.unweighted_growth},
          {"weighted_ratio", study.weighted_ratio},
          {"passes", study.passes}};
}

json to_json(const EmpiricalConstant& c) {
  return {{"kind", to_string(c.kind)},
          {"samples", c.samples},
          {"max_ratio_base", c.max_base},
          {"max_ratio", c.max_ratio},
          {"relative_change", c.relative_change},
          {"constant", c.constant},
          {"stable", c.stable}};
}

json to_json(const GronwallParams& g) {
  return {{"c1", g.c1}, {"c2", g.c2}, {"kappa", g.kappa}, {"a", g.a}, {"u0", g.u0}};
}

void write_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

namespace {

constexpr std::array<char, 8> kMagic{'B', 'L', 'K', 'S', 'T', 'O', 'C', 'K'};

void put_u64(std::ostream& out, std::uint64_t x) {
  std::array<char, 8> bytes;
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((x >> (8 * i)) & 0xff);
  out.write(bytes.data(), 8);
}

void put_u32(std::ostream& out, std::uint32_t x) {
  std::array<char, 4> bytes;
  for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((x >> (8 * i)) & 0xff);
  out.write(bytes.data(), 4);
}

void put_f64(std::ostream& out, double x) { put_u64(out, std::bit_cast<std::uint64_t>(x)); }

void put_field(std::ostream& out, const SpectralField& f) {
  for (std::size_t i = 0; i < f.size(); ++i) put_f64(out, f[i]);
}

std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> bytes;
  if (!in.read(reinterpret_cast<char*>(bytes.data()), 8)) throw std::runtime_error("checkpoint truncated");
  std::uint64_t x = 0;
  for (int i = 0; i < 8; ++i) x |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return x;
}

std::uint32_t get_u32(std::istream& in) {
  std::array<unsigned char, 4> bytes;
  if (!in.read(reinterpret_cast<char*>(bytes.data()), 4)) throw std::runtime_error("checkpoint truncated");
  std::uint32_t x = 0;
  for (int i = 0; i < 4; ++i) x |= static_cast<std::uint32_t>(bytes[i]) << (8 * i);
  return x;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

SpectralField get_field(std::istream& in, const Grid& grid) {
  SpectralField f(grid);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = get_f64(in);
  return f;
}

}  // namespace

void save_checkpoint(std::ostream& out, const Checkpoint& cp) {
  const Grid& grid = cp.state.grid();
  out.write(kMagic.data(), kMagic.size());
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(grid.dim()));
  for (int a = 0; a < grid.dim(); ++a) {
    put_f64(out, grid.extent(a));
    put_u32(out, static_cast<std::uint32_t>(grid.modes(a)));
  }
  put_u64(out, cp.step);
  put_f64(out, cp.start_time);
  put_f64(out, cp.state.time);
  put_f64(out, cp.d_cum);
  put_f64(out, cp.grad_ptt_cum);
  put_u32(out, cp.previous_source ? 1u : 0u);
  put_field(out, cp.state.psi);
  put_field(out, cp.state.v);
  if (cp.previous_source) put_field(out, *cp.previous_source);
}

Checkpoint load_checkpoint(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) throw std::runtime_error("not a checkpoint file");
  const std::uint32_t version = get_u32(in);
  if (version != kCheckpointVersion) {
    throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
  }
  const std::uint32_t dim = get_u32(in);
  if (dim < 1 || dim > 3) throw std::runtime_error("checkpoint has invalid dimension");
  std::vector<double> extents;
  std::vector<int> modes;
  for (std::uint32_t a = 0; a < dim; ++a) {
    extents.push_back(get_f64(in));
    modes.push_back(static_cast<int>(get_u32(in)));
  }
  const Grid grid(extents, modes);
  const std::uint64_t step = get_u64(in);
  const double start_time = get_f64(in);
  const double time = get_f64(in);
  const double d_cum = get_f64(in);
  const double grad_ptt_cum = get_f64(in);
  const bool has_prev = get_u32(in) != 0;
  SpectralField psi = get_field(in, grid);
  SpectralField v = get_field(in, grid);
  Checkpoint cp{SimState(std::move(psi), std::move(v), time), step, start_time, std::nullopt, d_cum, grad_ptt_cum};
  if (has_prev) cp.previous_source = get_field(in, grid);
  return cp;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& cp) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  save_checkpoint(out, cp);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read checkpoint " + path.string());
  return load_checkpoint(in);
}

}  // namespace blackstock
