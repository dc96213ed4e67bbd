#include "epdecay/trajectory_io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "epdecay/errors.hpp"

namespace epdecay {

namespace {

constexpr char kMagic[8] = {'E', 'P', 'D', 'T', 'R', 'J', '0', '1'};
constexpr std::size_t kFields = 11;

static_assert(std::endian::native == std::endian::little, "binary container assumes a little-endian host");

void write_u64(std::ostream& os, std::uint64_t v) { os.write(reinterpret_cast<const char*>(&v), sizeof v); }

std::uint64_t read_u64(std::istream& is) {
  std::uint64_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

const char* group_names[4] = {"densities_field", "velocities", "density_difference", "nondegenerate"};

}  // namespace

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

nlohmann::json to_json(const SolverConfig& c) {
  return {
      {"grid", {{"dim", c.grid.dim()}, {"points", c.grid.points()}, {"length", c.grid.length()}}},
      {"gamma", c.law.gamma()},
      {"mode", to_string(c.mode)},
      {"dt", c.dt},
      {"effective_dt", c.effective_dt()},
      {"final_time", c.final_time},
      {"snapshot_interval", c.snapshot_interval},
      {"dealias", c.dealias},
      {"initial",
       {{"kind", to_string(c.initial.kind)},
        {"amplitude", c.initial.amplitude},
        {"mass", c.initial.mass},
        {"seed", c.initial.seed}}},
      {"crossover_time", c.grid.crossover_time()},
  };
}

SolverConfig solver_config_from_json(const nlohmann::json& j) {
  try {
    SolverConfig c;
    const auto& g = j.at("grid");
    c.grid = Grid(g.at("dim").get<int>(), g.at("points").get<int>(), g.at("length").get<double>());
    c.law = PressureLaw(j.at("gamma").get<double>());
    c.mode = parse_solver_mode(j.at("mode").get<std::string>());
    c.dt = j.at("dt").get<double>();
    c.final_time = j.at("final_time").get<double>();
    c.snapshot_interval = j.at("snapshot_interval").get<double>();
    c.dealias = j.at("dealias").get<bool>();
    const auto& in = j.at("initial");
    c.initial.kind = parse_initial_kind(in.at("kind").get<std::string>());
    c.initial.amplitude = in.at("amplitude").get<double>();
    c.initial.mass = in.at("mass").get<double>();
    c.initial.seed = in.at("seed").get<std::uint64_t>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid solver configuration: ") + e.what());
  }
}

nlohmann::json to_json(const SnapshotDiagnostics& d) {
  nlohmann::json norms;
  for (std::size_t g = 0; g < 4; ++g) norms[group_names[g]] = d.group_norms[g];
  return {{"time", d.time},
          {"mass_e", d.mass_e},
          {"mass_i", d.mass_i},
          {"group_norms", norms},
          {"constraint_residual", d.constraint_residual},
          {"curl_residual", d.curl_residual},
          {"energy", d.energy},
          {"difference_energy", d.difference_energy},
          {"min_density", d.min_density}};
}

void write_trajectory(const std::filesystem::path& path, const Trajectory& t) {
  nlohmann::json header;
  header["format"] = "epdecay-trajectory";
  header["version"] = 1;
  header["config"] = to_json(t.config);
  header["times"] = t.times;
  header["spectral_size"] = t.grid().spectral_size();
  header["fields"] = {"sigma_e", "u_e1", "u_e2", "u_e3", "sigma_i", "u_i1", "u_i2", "u_i3", "E1", "E2", "E3"};
  header["scalar"] = "complex128";
  nlohmann::json diags = nlohmann::json::array();
  for (const auto& d : t.diagnostics) diags.push_back(to_json(d));
  header["diagnostics"] = diags;
  const std::string text = header.dump();

  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open '" + path.string() + "' for writing");
  os.write(kMagic, sizeof kMagic);
  write_u64(os, text.size());
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (std::size_t i = 0; i < t.size(); ++i) {
    auto put = [&](const SpectralField& f) {
      os.write(reinterpret_cast<const char*>(f.data()), static_cast<std::streamsize>(f.size() * sizeof(Complex)));
    };
    for (const auto& f : t.states[i].c) put(f);
    for (const auto& f : t.fields[i]) put(f);
  }
  if (!os) throw ConfigError("failed writing '" + path.string() + "'");
}

Trajectory read_trajectory(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open '" + path.string() + "'");
  char magic[8];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw ConfigError("'" + path.string() + "' is not a trajectory container");
  const std::uint64_t len = read_u64(is);
  if (!is || len > (1ull << 32)) throw ConfigError("corrupt trajectory header length");
  std::string text(len, '\0');
  is.read(text.data(), static_cast<std::streamsize>(len));
  if (!is) throw ConfigError("truncated trajectory header");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("corrupt trajectory header: ") + e.what());
  }
  Trajectory t;
  t.config = solver_config_from_json(header.at("config"));
  t.times = header.at("times").get<std::vector<double>>();
  const std::size_t n = header.at("spectral_size").get<std::size_t>();
  if (n != t.grid().spectral_size()) throw ConfigError("trajectory spectral size does not match its grid");

  const auto& diags = header.at("diagnostics");
  for (std::size_t i = 0; i < t.times.size(); ++i) {
    SpectralState s;
    SpectralVectorField e;
    auto get = [&](SpectralField& f) {
      f.resize(n);
      is.read(reinterpret_cast<char*>(f.data()), static_cast<std::streamsize>(n * sizeof(Complex)));
      if (!is) throw ConfigError("truncated trajectory data");
    };
    for (auto& f : s.c) get(f);
    for (auto& f : e) get(f);
    t.states.push_back(std::move(s));
    t.fields.push_back(std::move(e));

    SnapshotDiagnostics d;
    if (i < diags.size()) {
      const auto& j = diags[i];
      d.time = j.at("time");
      d.mass_e = j.at("mass_e");
      d.mass_i = j.at("mass_i");
      for (std::size_t g = 0; g < 4; ++g) d.group_norms[g] = j.at("group_norms").at(group_names[g]);
      d.constraint_residual = j.at("constraint_residual");
      d.curl_residual = j.at("curl_residual");
      d.energy = j.at("energy");
      d.difference_energy = j.at("difference_energy");
      d.min_density = j.at("min_density");
    }
    t.diagnostics.push_back(d);
  }
  static_assert(kFields == SpectralState::kComponents + 3);
  return t;
}

void write_diagnostics_csv(const std::filesystem::path& path, const Trajectory& t) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open '" + path.string() + "' for writing");
  os << "t,quantity,group,value\n";
  for (const auto& d : t.diagnostics) {
    const std::string ts = format_double(d.time);
    auto row = [&](const char* quantity, const char* group, double v) {
      os << ts << ',' << quantity << ',' << group << ',' << format_double(v) << '\n';
    };
    row("mass", "sigma_e", d.mass_e);
    row("mass", "sigma_i", d.mass_i);
    for (std::size_t g = 0; g < 4; ++g) row("l2_norm", group_names[g], d.group_norms[g]);
    row("constraint_residual", "E", d.constraint_residual);
    row("curl_residual", "E", d.curl_residual);
    row("energy", "all", d.energy);
    row("difference_energy", "difference", d.difference_energy);
    row("min_density", "all", d.min_density);
  }
}

}  // namespace epdecay
