#pragma once

// On-disk datasets: per-sample label sidecars, the manifest, and batch
// generation.
//
// A dataset directory holds sample_<i>.tox4 / sample_<i>.json pairs and a
// manifest.txt with one tab-separated line per sample:
//   <grid path>\t<label path>\t<b0> <b1> <b2> <b3>
// Paths are relative to the manifest's directory.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "toxel/betti.hpp"
#include "toxel/error.hpp"
#include "toxel/generator.hpp"
#include "toxel/grid4.hpp"
#include "toxel/parallel.hpp"

namespace toxel {

namespace fs = std::filesystem;

inline nlohmann::json betti_to_json(const BettiVector& b) {
  return nlohmann::json::array({b[0], b[1], b[2], b[3]});
}

inline BettiVector betti_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 4) throw FormatError("betti must be an array of 4 integers");
  BettiVector b;
  for (std::size_t k = 0; k < 4; ++k) {
    if (!j[k].is_number_integer()) throw FormatError("betti entries must be integers");
    b[k] = j[k].get<std::int64_t>();
  }
  return b;
}

inline nlohmann::json label_to_json(const SampleLabel& label) {
  nlohmann::json cavities = nlohmann::json::array();
  for (const Cavity& c : label.cavities) {
    cavities.push_back({{"kind", std::string(kind_name(c.shape.kind))},
                        {"a", c.shape.a},
                        {"r", c.shape.r},
                        {"R", c.shape.R},
                        {"alpha", c.shape.alpha},
                        {"center", c.center},
                        {"rot", c.rot.row_major()}});
  }
  return {{"betti", betti_to_json(label.betti)},
          {"grid_size", label.grid_size},
          {"seed", label.seed},
          {"cavities", std::move(cavities)}};
}

inline SampleLabel label_from_json(const nlohmann::json& j) {
  try {
    SampleLabel label;
    label.betti = betti_from_json(j.at("betti"));
    label.grid_size = j.at("grid_size").get<std::size_t>();
    label.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& c : j.at("cavities")) {
      Cavity cav;
      const auto kind = parse_kind(c.at("kind").get<std::string>());
      if (!kind) throw FormatError("unknown cavity kind " + c.at("kind").dump());
      cav.shape.kind = *kind;
      cav.shape.a = c.at("a").get<double>();
      cav.shape.r = c.at("r").get<double>();
      cav.shape.R = c.at("R").get<double>();
      cav.shape.alpha = c.at("alpha").get<double>();
      cav.center = c.at("center").get<Vec4>();
      cav.rot = Rot4::from_row_major(c.at("rot").get<std::array<double, 16>>());
      label.cavities.push_back(cav);
    }
    return label;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed label: ") + e.what());
  }
}

inline std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + p.string());
  out << text;
  if (!out) throw IoError("failed writing " + p.string());
}

inline void write_label_file(const fs::path& p, const SampleLabel& label) {
  write_text(p, label_to_json(label).dump(2) + "\n");
}

inline SampleLabel read_label_file(const fs::path& p) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text(p));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(p.string() + ": " + e.what());
  }
  return label_from_json(j);
}

struct ManifestEntry {
  std::string grid;   // relative to the manifest directory
  std::string label;  // relative path, or "-" when there is none
  BettiVector betti;
};

struct Manifest {
  fs::path dir;
  std::vector<ManifestEntry> entries;

  fs::path grid_path(std::size_t i) const { return dir / entries[i].grid; }
  fs::path label_path(std::size_t i) const { return dir / entries[i].label; }
};

inline std::string format_manifest(const std::vector<ManifestEntry>& entries) {
  std::string out;
  for (const auto& e : entries) out += e.grid + "\t" + e.label + "\t" + to_string(e.betti) + "\n";
  return out;
}

inline void write_manifest(const fs::path& p, const std::vector<ManifestEntry>& entries) {
  write_text(p, format_manifest(entries));
}

inline Manifest read_manifest(const fs::path& p) {
  Manifest m;
  m.dir = p.parent_path();
  std::istringstream in(read_text(p));
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) {
      throw FormatError(p.string() + ":" + std::to_string(lineno) + ": expected 3 tab-separated fields");
    }
    ManifestEntry e;
    e.grid = line.substr(0, t1);
    e.label = line.substr(t1 + 1, t2 - t1 - 1);
    std::istringstream bs(line.substr(t2 + 1));
    for (std::size_t k = 0; k < 4; ++k) {
      if (!(bs >> e.betti[k])) {
        throw FormatError(p.string() + ":" + std::to_string(lineno) + ": expected 4 Betti numbers");
      }
    }
    m.entries.push_back(std::move(e));
  }
  return m;
}

inline std::string sample_stem(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "sample_%05zu", index);
  return buf;
}

inline void save_sample(const fs::path& dir, std::size_t index, const Sample& s) {
  const std::string stem = sample_stem(index);
  write_grid_file(dir / (stem + ".tox4"), s.grid);
  write_label_file(dir / (stem + ".json"), s.label);
}

/// Writes `count` samples plus manifest.txt into `out_dir`. Sample i is
/// produced from derive_seed(master_seed, i), so the output does not depend
/// on `jobs`.
inline std::vector<ManifestEntry> generate_batch(std::uint64_t master_seed, std::size_t count,
                                                 const GenConfig& cfg, const fs::path& out_dir,
                                                 unsigned jobs = 1, int retries = 8) {
  cfg.validate();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  std::vector<ManifestEntry> entries(count);
  parallel_for(count, jobs, [&](std::size_t i) {
    const Sample s = generate_indexed(master_seed, i, cfg, retries);
    save_sample(out_dir, i, s);
    const std::string stem = sample_stem(i);
    entries[i] = {stem + ".tox4", stem + ".json", s.label.betti};
  });
  write_manifest(out_dir / "manifest.txt", entries);
  return entries;
}

}  // namespace toxel
