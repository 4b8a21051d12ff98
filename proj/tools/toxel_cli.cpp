#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "toxel/agreement.hpp"
#include "toxel/cnn/train.hpp"
#include "toxel/dataset.hpp"
#include "toxel/downscale.hpp"
#include "toxel/generator.hpp"
#include "toxel/homology.hpp"
#include "toxel/parallel.hpp"

#ifndef TOXEL_VERSION
#define TOXEL_VERSION "0.0.0"
#endif

using namespace toxel;
using ojson = nlohmann::ordered_json;

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Provenance written as run.json into every output directory.
struct RunRecord {
  std::vector<std::string> argv;
  ojson config = ojson::object();
  std::optional<std::uint64_t> seed;
  std::string started = utc_now();

  void write(const fs::path& dir) const {
    ojson j;
    j["command"] = argv;
    j["config"] = config;
    j["seed"] = seed ? ojson(*seed) : ojson(nullptr);
    j["version"] = TOXEL_VERSION;
    j["started"] = started;
    j["finished"] = utc_now();
    write_text(dir / "run.json", j.dump(2) + "\n");
  }
};

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

ojson report_json(const AgreementReport& r) {
  ojson j;
  j["count"] = r.count;
  j["per_beta"] = {round2(r.per_beta[0]), round2(r.per_beta[1]), round2(r.per_beta[2]), round2(r.per_beta[3])};
  j["combined"] = round2(r.combined);
  j["complete"] = round2(r.complete);
  return j;
}

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", round2(v));
  return buf;
}

void print_report(const AgreementReport& r) {
  std::cout << "b0\tb1\tb2\tb3\tcombined\tcomplete\tn\n";
  for (double p : r.per_beta) std::cout << fmt2(p) << "\t";
  std::cout << fmt2(r.combined) << "\t" << fmt2(r.complete) << "\t" << r.count << "\n";
}

std::vector<BettiVector> manifest_betti(const Manifest& m) {
  std::vector<BettiVector> out;
  for (const auto& e : m.entries) out.push_back(e.betti);
  return out;
}

BinaryGrid binary_input(const AnyGrid& g, std::optional<double> threshold) {
  if (const auto* f = std::get_if<FloatGrid>(&g)) {
    if (!threshold) throw DtypeError("grid is float32; pass --threshold to binarize it");
    return binarize(*f, *threshold);
  }
  return std::get<BinaryGrid>(g);
}

DownscaleConfig downscale_config(const std::string& mode, std::size_t factor, std::optional<double> threshold) {
  const auto m = parse_mode(mode);
  if (!m) throw ParameterError("unknown downscale mode '" + mode + "' (stride, avgpool)");
  DownscaleConfig cfg{*m, factor, threshold};
  cfg.validate();
  return cfg;
}

ojson downscale_json(const DownscaleConfig& c) {
  ojson j;
  j["mode"] = mode_name(c.mode);
  j["factor"] = c.factor;
  j["threshold"] = c.threshold ? ojson(*c.threshold) : ojson(nullptr);
  return j;
}

// ---------------------------------------------------------------------------

struct GenArgs {
  GenConfig cfg;
  std::size_t count = 10;
  std::uint64_t seed = 0;
  std::string out;
  unsigned jobs = default_jobs();
  int retries = 8;
  std::vector<double> kind_weights;
};

int cmd_gen(GenArgs a, RunRecord rec) {
  if (!a.kind_weights.empty()) std::copy(a.kind_weights.begin(), a.kind_weights.end(), a.cfg.kind_weights.begin());
  a.cfg.validate();
  make_dir(a.out);
  generate_batch(a.seed, a.count, a.cfg, a.out, a.jobs, a.retries);
  rec.seed = a.seed;
  rec.config = {{"grid_size", a.cfg.grid_size},
                {"count", a.count},
                {"min_holes", a.cfg.min_holes},
                {"max_holes", a.cfg.max_holes},
                {"spacing", a.cfg.spacing},
                {"boundary_margin", a.cfg.boundary_margin},
                {"a_min", a.cfg.a_min},
                {"a_max", a.cfg.a_max},
                {"kind_weights", a.cfg.kind_weights},
                {"max_placement_attempts", a.cfg.max_placement_attempts},
                {"max_per_betti", a.cfg.max_per_betti},
                {"retries", a.retries}};
  rec.write(a.out);
  std::cout << "wrote " << a.count << " samples to " << a.out << "\n";
  return 0;
}

struct DownscaleArgs {
  std::string in, manifest, out, mode = "stride";
  std::size_t factor = 4;
  std::optional<double> threshold;
  unsigned jobs = default_jobs();
};

int cmd_downscale(const DownscaleArgs& a, RunRecord rec) {
  const DownscaleConfig cfg = downscale_config(a.mode, a.factor, a.threshold);
  make_dir(a.out);
  rec.config = downscale_json(cfg);
  if (!a.in.empty()) {
    const fs::path in(a.in);
    write_grid_file(fs::path(a.out) / in.filename(), downscale(read_grid_file(in), cfg));
    rec.config["input"] = a.in;
  } else {
    const Manifest m = read_manifest(a.manifest);
    std::vector<ManifestEntry> entries(m.entries.size());
    parallel_for(m.entries.size(), a.jobs, [&](std::size_t i) {
      const std::string name = fs::path(m.entries[i].grid).filename().string();
      write_grid_file(fs::path(a.out) / name, downscale(read_grid_file(m.grid_path(i)), cfg));
      entries[i] = {name, "-", m.entries[i].betti};
    });
    write_manifest(fs::path(a.out) / "manifest.txt", entries);
    rec.config["manifest"] = a.manifest;
  }
  rec.write(a.out);
  return 0;
}

struct HomologyArgs {
  std::string in, method = "reduction";
  std::optional<double> threshold;
  std::uint64_t budget = kDefaultCellBudget;
  bool json = false;
};

int cmd_homology(const HomologyArgs& a) {
  const BinaryGrid g = binary_input(read_grid_file(a.in), a.threshold);
  ojson j;
  j["input"] = a.in;
  j["method"] = a.method;
  std::string text;
  if (a.method == "reduction") {
    const ReductionResult r = analyze_grid(g, a.budget);
    j["betti"] = {r.betti[0], r.betti[1], r.betti[2], r.betti[3]};
    j["euler"] = r.betti.euler();
    j["cells"] = r.counts.n;
    text = to_string(r.betti);
  } else if (a.method == "unionfind") {
    const auto b0 = beta0_unionfind(g);
    j["b0"] = b0;
    text = std::to_string(b0);
  } else if (a.method == "duality") {
    if (!boundary_layer_is_foreground(g)) {
      std::cerr << "warning: boundary layer has background toxels; duality count may differ\n";
    }
    const auto b3 = beta3_duality(g);
    j["b3"] = b3;
    text = std::to_string(b3);
  } else {
    throw ParameterError("unknown method '" + a.method + "' (reduction, unionfind, duality)");
  }
  std::cout << (a.json ? j.dump(2) : text) << "\n";
  return 0;
}

struct AnalyzeArgs {
  std::string manifest, out, mode = "stride";
  std::size_t factor = 1;
  std::optional<double> threshold;
  std::uint64_t budget = kDefaultCellBudget;
  unsigned jobs = default_jobs();
  bool json = false, allow_partial = false;
};

// Downscale, binarize if needed, reduce, compare with the label. Samples that
// fail are excluded from the statistics and counted.
int cmd_analyze(const AnalyzeArgs& a, RunRecord rec) {
  const DownscaleConfig cfg = downscale_config(a.mode, a.factor, a.threshold);
  if (cfg.mode == DownscaleMode::AvgPool && !cfg.threshold && cfg.factor > 1) {
    throw ParameterError("avgpool analysis needs --threshold to binarize");
  }
  const Manifest m = read_manifest(a.manifest);
  const std::size_t n = m.entries.size();
  std::vector<BettiVector> got(n);
  std::vector<std::string> failure(n);
  std::vector<int> code(n, 0);
  parallel_for(n, a.jobs, [&](std::size_t i) {
    try {
      const AnyGrid small = cfg.factor == 1 ? read_grid_file(m.grid_path(i)) : downscale(read_grid_file(m.grid_path(i)), cfg);
      got[i] = compute_betti(binary_input(small, cfg.threshold), a.budget);
    } catch (const Error& e) {
      failure[i] = e.what();
      code[i] = e.exit_code();
    }
  });

  std::vector<BettiVector> labels, results;
  std::string rows = "grid\tlabel\tcomputed\tstatus\n";
  std::size_t failed = 0;
  int first_code = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& e = m.entries[i];
    if (code[i] != 0) {
      ++failed;
      if (first_code == 0) first_code = code[i];
      std::cerr << e.grid << ": " << failure[i] << "\n";
      rows += e.grid + "\t" + to_string(e.betti) + "\t-\terror: " + failure[i] + "\n";
      continue;
    }
    labels.push_back(e.betti);
    results.push_back(got[i]);
    rows += e.grid + "\t" + to_string(e.betti) + "\t" + to_string(got[i]) + "\t" +
            (got[i] == e.betti ? "match" : "mismatch") + "\n";
  }
  const AgreementReport r = agreement(labels, results);
  ojson j = report_json(r);
  j["failed"] = failed;
  if (a.json) {
    std::cout << j.dump(2) << "\n";
  } else {
    print_report(r);
    if (failed) std::cout << "failed\t" << failed << "\n";
  }
  if (!a.out.empty()) {
    make_dir(a.out);
    write_text(fs::path(a.out) / "results.tsv", rows);
    write_text(fs::path(a.out) / "report.json", j.dump(2) + "\n");
    rec.config = downscale_json(cfg);
    rec.config["manifest"] = a.manifest;
    rec.config["cell_budget"] = a.budget;
    rec.write(a.out);
  }
  return failed && !a.allow_partial ? first_code : 0;
}

struct StatsArgs {
  std::string pred, truth;
  std::vector<double> per_beta;
  bool json = false;
};

int cmd_stats(const StatsArgs& a) {
  AgreementReport r;
  if (!a.per_beta.empty()) {
    if (a.per_beta.size() != 4) throw ParameterError("--per-beta takes four percentages");
    for (std::size_t k = 0; k < 4; ++k) r.per_beta[k] = a.per_beta[k];
    r.combined = combined_accuracy(r.per_beta);
    if (a.json) {
      ojson j;
      j["per_beta"] = a.per_beta;
      j["combined"] = round2(r.combined);
      std::cout << j.dump(2) << "\n";
    } else {
      std::cout << "combined\t" << fmt2(r.combined) << "\n";
    }
    return 0;
  }
  if (a.pred.empty() || a.truth.empty()) throw ParameterError("stats needs --pred and --truth, or --per-beta");
  r = agreement(manifest_betti(read_manifest(a.truth)), manifest_betti(read_manifest(a.pred)));
  if (a.json) {
    std::cout << report_json(r).dump(2) << "\n";
  } else {
    print_report(r);
  }
  return 0;
}

struct SliceArgs {
  std::string in, out;
  std::size_t axis = 3, count = 18;
  std::vector<std::size_t> indices;
  bool invert = false, sections = false;
};

std::uint8_t gray(double v, bool invert) {
  const auto g = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
  return invert ? static_cast<std::uint8_t>(255 - g) : g;
}

void write_pgm(const fs::path& p, std::size_t w, std::size_t h, const std::vector<std::uint8_t>& px) {
  std::string s = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  s.append(px.begin(), px.end());
  write_text(p, s);
}

// Each 3D slice becomes one image whose 2D sections along its last axis are
// tiled left to right, top to bottom; with --sections every 2D section is its
// own file.
template <class T>
std::size_t write_slices(const Grid<T>& g, const SliceArgs& a) {
  static constexpr const char* kAxis = "xyzw";
  const std::vector<std::size_t> idx = a.indices.empty() ? equally_spaced(g.extent(a.axis), a.count) : a.indices;
  std::size_t files = 0;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const Slice3<T> s = slice3(g, a.axis, idx[k]);
    const std::size_t w = s.extent[0], h = s.extent[1], depth = s.extent[2];
    char stem[64];
    std::snprintf(stem, sizeof stem, "slice_%02zu_%c%03zu", k, kAxis[a.axis], idx[k]);
    if (a.sections) {
      for (std::size_t c = 0; c < depth; ++c) {
        std::vector<std::uint8_t> px(w * h);
        for (std::size_t y = 0; y < h; ++y)
          for (std::size_t x = 0; x < w; ++x) px[y * w + x] = gray(static_cast<double>(s.at(x, y, c)), a.invert);
        char name[96];
        std::snprintf(name, sizeof name, "%s_%03zu.pgm", stem, c);
        write_pgm(fs::path(a.out) / name, w, h, px);
        ++files;
      }
      continue;
    }
    const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(depth))));
    const std::size_t rows = (depth + cols - 1) / cols;
    std::vector<std::uint8_t> px(cols * w * rows * h, gray(0.0, a.invert));
    for (std::size_t c = 0; c < depth; ++c) {
      const std::size_t ox = (c % cols) * w, oy = (c / cols) * h;
      for (std::size_t y = 0; y < h; ++y)
        for (std::size_t x = 0; x < w; ++x)
          px[(oy + y) * cols * w + ox + x] = gray(static_cast<double>(s.at(x, y, c)), a.invert);
    }
    write_pgm(fs::path(a.out) / (std::string(stem) + ".pgm"), cols * w, rows * h, px);
    ++files;
  }
  return files;
}

int cmd_slice(const SliceArgs& a, RunRecord rec) {
  const AnyGrid g = read_grid_file(a.in);
  if (a.axis > 3) throw BoundsError("slice axis must be 0..3");
  if (a.indices.empty() && a.count == 0) throw ParameterError("--count must be positive");
  make_dir(a.out);
  const std::size_t files = std::visit([&](const auto& x) { return write_slices(x, a); }, g);
  rec.config = {{"input", a.in}, {"axis", a.axis}, {"count", a.count}, {"indices", a.indices},
                {"invert", a.invert}, {"sections", a.sections}};
  rec.write(a.out);
  std::cout << "wrote " << files << " images to " << a.out << "\n";
  return 0;
}

struct TrainArgs {
  std::string manifest, out, mode = "stride", preset = "desk";
  std::optional<std::size_t> epochs, batch, fc_hidden;
  std::optional<double> lr;
  std::vector<std::size_t> channels;
  std::uint64_t seed = 0;
  bool no_augment = false;
};

int cmd_train(const TrainArgs& a, RunRecord rec) {
  using namespace toxel::cnn;
  const auto mode = parse_mode(a.mode);
  if (!mode) throw ParameterError("unknown mode '" + a.mode + "' (stride, avgpool)");
  if (a.preset != "full" && a.preset != "desk") throw ParameterError("preset must be full or desk");
  const Manifest m = read_manifest(a.manifest);
  if (m.entries.empty()) throw ParameterError("manifest is empty");
  const Dims4 d = dims_of(read_grid_file(m.grid_path(0)));
  if (!(d[0] == d[1] && d[1] == d[2] && d[2] == d[3])) throw ShapeError("training needs cubic grids, got " + to_string(d));

  TrainConfig t = a.preset == "full" ? TrainConfig::full(*mode) : TrainConfig::desk(*mode, a.epochs.value_or(50));
  if (a.epochs && a.preset == "full") {
    t.epochs = *a.epochs;
    t.lr_drop_epochs = {t.epochs * 80 / 100, t.epochs * 95 / 100};
  }
  if (a.batch) t.batch_size = *a.batch;
  if (a.lr) t.lr = *a.lr;
  t.seed = a.seed;
  t.augment = !a.no_augment;
  CNNConfig c = a.preset == "full" ? CNNConfig{} : desk_cnn_config();
  c.input_size = d[0];
  if (!a.channels.empty()) c.conv_channels = a.channels;
  if (a.fc_hidden) c.fc_hidden = *a.fc_hidden;
  t.validate();
  c.validate();

  const Dataset data = load_dataset(m, c.input_size, c.heads);
  make_dir(a.out);
  const fs::path out(a.out);
  std::string metrics;
  const TrainResult r = train(data, c, t, [&](const EpochMetrics& em) {
    metrics += metrics_line(em) + "\n";
    std::cerr << "epoch " << em.epoch << " loss " << em.train_loss << " val combined " << fmt2(em.val.combined)
              << "\n";
  });
  write_text(out / "metrics.jsonl", metrics);
  save_checkpoint(out / "model.toxn", r.checkpoint);
  ojson split;
  split["train"] = r.split.train;
  split["val"] = r.split.val;
  split["test"] = r.split.test;
  write_text(out / "split.json", split.dump() + "\n");
  const AgreementReport test = evaluate(r.checkpoint.model, data, r.split.test);
  write_text(out / "test_report.json", report_json(test).dump(2) + "\n");

  rec.seed = a.seed;
  rec.config = {{"manifest", a.manifest},
                {"mode", a.mode},
                {"preset", a.preset},
                {"epochs", t.epochs},
                {"batch_size", t.batch_size},
                {"lr", t.lr},
                {"lr_drop_epochs", t.lr_drop_epochs},
                {"split", t.split},
                {"augment", t.augment},
                {"input_size", c.input_size},
                {"conv_channels", c.conv_channels},
                {"fc_hidden", c.fc_hidden}};
  rec.write(out);
  print_report(test);
  return 0;
}

struct EvalArgs {
  std::string checkpoint, manifest, out;
  bool json = false;
};

int cmd_eval(const EvalArgs& a, RunRecord rec) {
  using namespace toxel::cnn;
  const auto ck = load_checkpoint<float>(a.checkpoint);
  const Manifest m = read_manifest(a.manifest);
  const Dataset data = load_dataset(m, ck.model.config().input_size, ck.model.config().heads);
  std::vector<std::size_t> all(data.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const auto pred = predict_all(ck.model, data.grids, all);
  const AgreementReport r = agreement(data.labels, pred);
  if (a.json) {
    std::cout << report_json(r).dump(2) << "\n";
  } else {
    print_report(r);
  }
  if (!a.out.empty()) {
    make_dir(a.out);
    std::vector<ManifestEntry> entries;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      entries.push_back({(fs::absolute(m.grid_path(i))).string(), "-", pred[i]});
    }
    write_manifest(fs::path(a.out) / "predictions.txt", entries);
    write_text(fs::path(a.out) / "report.json", report_json(r).dump(2) + "\n");
    rec.config = {{"checkpoint", a.checkpoint}, {"manifest", a.manifest}};
    rec.write(a.out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic 4D toxel datasets, cubical homology and a 4D CNN"};
  app.set_version_flag("--version", TOXEL_VERSION);
  app.require_subcommand(1);
  RunRecord rec;
  rec.argv.assign(argv, argv + argc);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a labelled dataset");
  g->add_option("--size", gen.cfg.grid_size, "Grid edge length")->capture_default_str();
  g->add_option("--count", gen.count, "Number of samples")->capture_default_str();
  g->add_option("--min-holes", gen.cfg.min_holes)->capture_default_str();
  g->add_option("--max-holes", gen.cfg.max_holes)->capture_default_str();
  g->add_option("--spacing", gen.cfg.spacing, "Minimum gap between cavities")->capture_default_str();
  g->add_option("--margin", gen.cfg.boundary_margin, "Solid layer kept at the boundary")->capture_default_str();
  g->add_option("--a-min", gen.cfg.a_min)->capture_default_str();
  g->add_option("--a-max", gen.cfg.a_max)->capture_default_str();
  g->add_option("--kind-weights", gen.kind_weights, "Weights of the four cavity kinds")->expected(4);
  g->add_option("--max-attempts", gen.cfg.max_placement_attempts)->capture_default_str();
  g->add_option("--retries", gen.retries, "Fresh seeds tried per sample")->capture_default_str();
  g->add_option("--seed", gen.seed)->capture_default_str();
  g->add_option("--out", gen.out)->required();
  g->add_option("--jobs", gen.jobs)->check(CLI::PositiveNumber);

  DownscaleArgs ds;
  auto* d = app.add_subcommand("downscale", "Stride-downsample or average-pool grids");
  auto* d_in = d->add_option("--in", ds.in, "Single grid file");
  auto* d_man = d->add_option("--manifest", ds.manifest, "Manifest of grids");
  d_in->excludes(d_man);
  d->add_option("--mode", ds.mode, "stride or avgpool")->capture_default_str();
  d->add_option("--factor", ds.factor)->capture_default_str();
  d->add_option("--threshold", ds.threshold, "Binarize pooled output at this level");
  d->add_option("--out", ds.out, "Output directory")->required();
  d->add_option("--jobs", ds.jobs)->check(CLI::PositiveNumber);

  HomologyArgs hom;
  auto* h = app.add_subcommand("homology", "Betti numbers of one grid");
  h->add_option("--in", hom.in)->required();
  h->add_option("--method", hom.method, "reduction, unionfind (b0) or duality (b3)")->capture_default_str();
  h->add_option("--threshold", hom.threshold, "Binarize a float grid first");
  h->add_option("--budget", hom.budget, "Maximum cells in the complex")->capture_default_str();
  h->add_flag("--json", hom.json);

  AnalyzeArgs an;
  auto* z = app.add_subcommand("analyze", "Compare computed homology with labels");
  z->add_option("--manifest", an.manifest)->required();
  z->add_option("--mode", an.mode)->capture_default_str();
  z->add_option("--factor", an.factor, "1 keeps the grids as they are")->capture_default_str();
  z->add_option("--threshold", an.threshold);
  z->add_option("--budget", an.budget)->capture_default_str();
  z->add_option("--jobs", an.jobs)->check(CLI::PositiveNumber);
  z->add_option("--out", an.out);
  z->add_flag("--json", an.json);
  z->add_flag("--allow-partial", an.allow_partial, "Exit 0 even when some samples fail");

  StatsArgs st;
  auto* s = app.add_subcommand("stats", "Agreement between two manifests");
  s->add_option("--pred", st.pred);
  s->add_option("--truth", st.truth);
  s->add_option("--per-beta", st.per_beta, "Four per-Betti accuracies to combine")->expected(4);
  s->add_flag("--json", st.json);

  SliceArgs sl;
  auto* v = app.add_subcommand("slice", "Write 3D slices as PGM images");
  v->add_option("--in", sl.in)->required();
  v->add_option("--out", sl.out)->required();
  v->add_option("--axis", sl.axis, "Axis to slice along (0..3 = x y z w)")->capture_default_str();
  v->add_option("--count", sl.count, "Equally spaced slices")->capture_default_str();
  v->add_option("--indices", sl.indices, "Explicit slice indices");
  v->add_flag("--invert", sl.invert, "Show cavities white");
  v->add_flag("--sections", sl.sections, "One image per 2D section");

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "Train the Betti-number CNN");
  t->add_option("--manifest", tr.manifest)->required();
  t->add_option("--out", tr.out)->required();
  t->add_option("--mode", tr.mode, "Downscale mode of the inputs; picks the learning rate")->capture_default_str();
  t->add_option("--preset", tr.preset, "full or desk")->capture_default_str();
  t->add_option("--epochs", tr.epochs);
  t->add_option("--batch", tr.batch);
  t->add_option("--lr", tr.lr);
  t->add_option("--channels", tr.channels, "Conv channels per stage")->delimiter(',');
  t->add_option("--fc-hidden", tr.fc_hidden);
  t->add_option("--seed", tr.seed)->capture_default_str();
  t->add_flag("--no-augment", tr.no_augment);

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Evaluate a checkpoint on a manifest");
  e->add_option("--checkpoint", ev.checkpoint)->required();
  e->add_option("--manifest", ev.manifest)->required();
  e->add_option("--out", ev.out);
  e->add_flag("--json", ev.json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*g) return cmd_gen(gen, rec);
    if (*d) {
      if (ds.in.empty() == ds.manifest.empty()) throw ParameterError("downscale needs --in or --manifest");
      return cmd_downscale(ds, rec);
    }
    if (*h) return cmd_homology(hom);
    if (*z) return cmd_analyze(an, rec);
    if (*s) return cmd_stats(st);
    if (*v) return cmd_slice(sl, rec);
    if (*t) return cmd_train(tr, rec);
    if (*e) return cmd_eval(ev, rec);
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return err.exit_code();
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
