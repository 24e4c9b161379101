#include "sdelab/io.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "sdelab/version.hpp"

namespace sdelab {

namespace {

constexpr char kPathMagic[8] = {'S', 'D', 'L', 'B', 'P', 'A', 'T', 'H'};

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, mode);
  if (!out) throw std::runtime_error("io: cannot open '" + path + "' for writing");
  return out;
}

void csv_header(std::ofstream& out, int dim) {
  out << "path_id,t";
  for (int c = 1; c <= dim; ++c) out << ",x_" << c;
  out << "\n";
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_marginal_csv(const MarginalSample& samples, const std::string& path) {
  auto out = open_out(path);
  csv_header(out, samples.dim);
  const std::string t = format_double(samples.time);
  for (std::size_t i = 0; i < samples.count; ++i) {
    out << i << ',' << t;
    const double* r = samples.row(i);
    for (int c = 0; c < samples.dim; ++c) out << ',' << format_double(r[c]);
    out << '\n';
  }
}

void write_paths_csv(const PathSet& paths, const std::string& path) {
  auto out = open_out(path);
  csv_header(out, paths.dim);
  for (std::size_t i = 0; i < paths.count; ++i)
    for (std::size_t k = 0; k < paths.times.size(); ++k) {
      out << i << ',' << format_double(paths.times[k]);
      const double* r = paths.at(i, k);
      for (int c = 0; c < paths.dim; ++c) out << ',' << format_double(r[c]);
      out << '\n';
    }
}

void write_paths_binary(const PathSet& paths, const std::string& path) {
  auto out = open_out(path, std::ios::out | std::ios::binary);
  std::uint64_t head[4];
  std::memcpy(&head[0], kPathMagic, 8);
  head[1] = paths.times.size();
  head[2] = static_cast<std::uint64_t>(paths.dim);
  head[3] = paths.count;
  out.write(reinterpret_cast<const char*>(head), sizeof(head));
  out.write(reinterpret_cast<const char*>(paths.data.data()),
            static_cast<std::streamsize>(paths.data.size() * sizeof(double)));
}

PathSet read_paths_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("io: cannot open '" + path + "'");
  std::uint64_t head[4];
  in.read(reinterpret_cast<char*>(head), sizeof(head));
  if (!in || std::memcmp(&head[0], kPathMagic, 8) != 0)
    throw std::runtime_error("io: '" + path + "' is not a path block (bad magic)");
  PathSet ps;
  ps.times.resize(head[1]);
  ps.dim = static_cast<int>(head[2]);
  ps.count = head[3];
  ps.data.resize(head[1] * head[2] * head[3]);
  in.read(reinterpret_cast<char*>(ps.data.data()),
          static_cast<std::streamsize>(ps.data.size() * sizeof(double)));
  if (!in) throw std::runtime_error("io: '" + path + "' truncated");
  return ps;
}

void write_density_csv(const DensityGrid& grid, const std::string& path) {
  auto out = open_out(path);
  if (grid.lattice.dim == 1) {
    out << "y,value\n";
    for (std::size_t i = 0; i < grid.values.size(); ++i)
      out << format_double(grid.lattice.coord(i, 0)) << ',' << format_double(grid.values[i])
          << '\n';
  } else {
    out << "y1,y2,value\n";
    for (std::size_t i = 0; i < grid.values.size(); ++i) {
      const auto pt = grid.lattice.point(i);
      out << format_double(pt[0]) << ',' << format_double(pt[1]) << ','
          << format_double(grid.values[i]) << '\n';
    }
  }
}

void write_density_meta(const DensityGrid& grid, const std::string& path,
                        std::size_t exclusions) {
  nlohmann::json j;
  j["time"] = grid.time;
  j["mass"] = grid.mass;
  j["tail_mass"] = grid.tail_mass;
  j["bandwidth"] = grid.bandwidth;
  j["exclusions"] = exclusions;
  j["lattice"] = {{"dim", grid.lattice.dim},
                  {"origin", std::vector<double>(grid.lattice.origin.begin(),
                                                 grid.lattice.origin.begin() + grid.lattice.dim)},
                  {"spacing", grid.lattice.spacing},
                  {"shape", std::vector<std::size_t>(
                                grid.lattice.shape.begin(),
                                grid.lattice.shape.begin() + grid.lattice.dim)}};
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

void write_duhamel_solution(const DuhamelSolution& sol, const std::string& directory) {
  namespace fs = std::filesystem;
  fs::create_directories(directory);
  char name[64];
  for (std::size_t i = 0; i < sol.slices.size(); ++i) {
    std::snprintf(name, sizeof(name), "slice_%03zu.csv", i);
    write_density_csv(sol.slices[i], (fs::path(directory) / name).string());
  }
  nlohmann::json j;
  j["iterations"] = sol.iterations;
  j["converged"] = sol.converged;
  j["residual"] = sol.residual;
  j["residual_history"] = sol.residual_history;
  j["clamped"] = sol.clamped;
  j["slice_times"] = sol.slice_times;
  j["final_mass"] = sol.grid.mass;
  j["final_tail_mass"] = sol.grid.tail_mass;
  auto out = open_out((fs::path(directory) / "solution.json").string());
  out << j.dump(2) << '\n';
}

void write_manifest(const Manifest& m, const std::string& path) {
  nlohmann::json j;
  j["command"] = m.command;
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(m.config_hash));
  j["config_hash"] = hash;
  j["version"] = kVersion;
  j["elapsed_seconds"] = m.elapsed_seconds;
  for (const auto& [k, v] : m.entries) j[k] = v;
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

void write_error_json(const std::string& path, const std::string& kind,
                      const std::string& message) {
  nlohmann::json j;
  j["error"] = kind;
  j["message"] = message;
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

}  // namespace sdelab
