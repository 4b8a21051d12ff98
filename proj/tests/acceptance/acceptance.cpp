// Acceptance run: prints one PASS/FAIL line per criterion 1..11.
// Optional arguments restrict the run to the listed criterion numbers.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "toxel/agreement.hpp"
#include "toxel/cnn/checkpoint.hpp"
#include "toxel/cnn/train.hpp"
#include "toxel/dataset.hpp"
#include "toxel/downscale.hpp"
#include "toxel/generator.hpp"
#include "toxel/homology.hpp"

using namespace toxel;
using namespace toxel::cnn;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void log(const std::string& s) { std::cerr << s << std::endl; }

// Every grid reduced anywhere in the run is checked against the Euler
// identity; criterion 4 reports the tally.
struct EulerTally {
  std::size_t grids = 0, failures = 0;
} euler_tally;

ReductionResult reduce(const BinaryGrid& g) {
  const ReductionResult r = analyze_grid(g);
  ++euler_tally.grids;
  if (r.counts.euler() != r.betti.euler()) ++euler_tally.failures;
  return r;
}

// ---------------------------------------------------------------------------

Outcome radius_ranges() {
  const auto b = radius_interval(ShapeKind::Ball4, 2.4, 6.4);
  const auto s1 = radius_interval(ShapeKind::TorusS1B3, 2.4, 6.4);
  const auto s2 = radius_interval(ShapeKind::TorusS2B2, 2.4, 6.4);
  const auto t = radius_interval(ShapeKind::TorusT2B2, 2.4, 6.4);
  const double pi = std::numbers::pi;
  // Ball radius; S^1 x B^3 major and tube; S^2 x B^2 major and tube;
  // S^1 x S^1 x B^2 major over alpha in [0, pi/2] and middle radius.
  const std::vector<std::pair<double, double>> got{
      {b.lo, b.hi},
      {ShapeSpec::torus_s1b3(s1.lo).R, ShapeSpec::torus_s1b3(s1.hi).R},
      {s1.lo, s1.hi},
      {ShapeSpec::torus_s2b2(s2.lo).R, ShapeSpec::torus_s2b2(s2.hi).R},
      {s2.lo, s2.hi},
      {ShapeSpec::torus_t2b2(t.lo, 0).R, ShapeSpec::torus_t2b2(t.hi, pi / 2).R},
      {ShapeSpec::torus_t2b2(t.lo, 0).r, ShapeSpec::torus_t2b2(t.hi, 0).r}};
  const std::vector<std::pair<double, double>> want{{7.6, 24.1}, {8.4, 26.7}, {4.2, 13.3}, {6.4, 20.3},
                                                    {3.2, 10.1}, {4.8, 25.6}, {4.8, 12.8}};
  double worst = 0;
  for (std::size_t i = 0; i < want.size(); ++i) {
    worst = std::max({worst, std::abs(got[i].first - want[i].first), std::abs(got[i].second - want[i].second)});
  }
  return {worst <= 0.05, "14 endpoints, worst deviation " + fmt("%.4f", worst)};
}

Outcome label_soundness() {
  GenConfig cfg;
  cfg.grid_size = 48;
  cfg.min_holes = 1;
  cfg.max_holes = 6;
  std::size_t ok = 0;
  const std::size_t n = 100;
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < n; ++i) {
    const Sample s = generate_indexed(2024, i, cfg);
    const BettiVector b = reduce(s.grid).betti;
    if (b == s.label.betti) {
      ++ok;
    } else {
      log("  sample " + std::to_string(i) + ": label " + to_string(s.label.betti) + ", computed " + to_string(b));
    }
    if ((i + 1) % 20 == 0) log("  label soundness " + std::to_string(i + 1) + "/" + std::to_string(n));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {ok == n, std::to_string(ok) + "/" + std::to_string(n) + " at 48^4, " + fmt("%.1f", secs / n) +
                       " s per sample"};
}

Outcome single_cavities() {
  const std::size_t n = 32;
  const double c = (static_cast<double>(n) - 1) / 2;
  const std::vector<std::pair<ShapeSpec, BettiVector>> cases{
      {ShapeSpec::ball4(radius_interval(ShapeKind::Ball4, 2.4, 6.4).lo), {{1, 0, 0, 1}}},
      {ShapeSpec::torus_s1b3(radius_interval(ShapeKind::TorusS1B3, 2.4, 6.4).lo), {{1, 0, 1, 1}}},
      {ShapeSpec::torus_s2b2(radius_interval(ShapeKind::TorusS2B2, 2.4, 6.4).lo), {{1, 1, 0, 1}}},
      {ShapeSpec::torus_t2b2(2.4, 0.0), {{1, 1, 2, 1}}}};
  bool all = true;
  std::string got;
  for (const auto& [shape, want] : cases) {
    BinaryGrid g(Dims4::cube(n), 1);
    carve(g, Cavity{shape, {c, c, c, c}, Rot4::identity()});
    const BettiVector b = reduce(g).betti;
    all = all && b == want;
    got += (got.empty() ? "" : ", ") + std::string("(") + to_string(b) + ")";
  }
  return {all, got};
}

Outcome euler_identity() {
  // Extra noise grids, then everything reduced elsewhere in the run.
  std::mt19937_64 rng(44);
  for (int i = 0; i < 20; ++i) {
    std::bernoulli_distribution bit(0.3 + 0.02 * i);
    BinaryGrid g(Dims4::cube(8));
    for (auto& v : g.data()) v = bit(rng) ? 1 : 0;
    reduce(g);
  }
  return {euler_tally.failures == 0, std::to_string(euler_tally.grids - euler_tally.failures) + "/" +
                                         std::to_string(euler_tally.grids) + " grids"};
}

Outcome cross_oracles() {
  std::size_t ok = 0, n = 0;
  auto check = [&](const BinaryGrid& g) {
    const BettiVector b = reduce(g).betti;
    const bool same = beta0_unionfind(g) == b[0] && beta3_duality(g) == b[3];
    ok += same ? 1 : 0;
    ++n;
  };
  GenConfig small;
  small.grid_size = 24;
  small.a_min = 0.8;
  small.a_max = 1.6;
  small.spacing = 1.5;
  small.max_holes = 8;
  for (std::size_t i = 0; i < 120; ++i) check(generate_indexed(505, i, small).grid);
  GenConfig wide;
  wide.grid_size = 32;
  wide.max_holes = 3;
  wide.spacing = 2.0;
  for (std::size_t i = 0; i < 80; ++i) check(generate_indexed(506, i, wide).grid);
  return {ok == n, std::to_string(ok) + "/" + std::to_string(n) + " carved grids agree on b0 and b3"};
}

Outcome downscale_disruption() {
  GenConfig cfg;
  cfg.grid_size = 64;
  cfg.max_holes = 6;
  std::vector<BettiVector> labels, got;
  const std::size_t n = 100;
  for (std::size_t i = 0; i < n; ++i) {
    const Sample s = generate_indexed(606, i, cfg);
    labels.push_back(s.label.betti);
    got.push_back(reduce(downsample(s.grid, 4)).betti);
  }
  const AgreementReport r = agreement(labels, got);
  std::ostringstream d;
  d << "64^4 -> 16^4 stride over " << n << " samples: b0 " << fmt("%.2f", r.per_beta[0]) << ", b1 "
    << fmt("%.2f", r.per_beta[1]) << ", b2 " << fmt("%.2f", r.per_beta[2]) << ", b3 " << fmt("%.2f", r.per_beta[3])
    << ", complete " << fmt("%.2f", r.complete);
  return {r.complete < 50.0 && r.per_beta[0] == 100.0, d.str()};
}

Outcome combined_formula() {
  const double a = round2(combined_accuracy({100, 50.2, 44.23, 12.88}));
  const double b = round2(combined_accuracy({100, 91.74, 78.26, 92.78}));
  return {a == 51.83 && b == 90.70, fmt("%.2f", a) + " and " + fmt("%.2f", b)};
}

Outcome hypervolumes() {
  Rng rng(808);
  const RadiusRanges ranges{2.4, 6.4};
  std::map<ShapeKind, double> worst;
  std::uniform_real_distribution<double> jitter(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const ShapeKind kind = kAllShapeKinds[static_cast<std::size_t>(i % 4)];
    Cavity cav{sample_shape(rng, kind, ranges), {}, random_rotation(rng)};
    const double rho = bounding_radius(cav.shape);
    const auto n = static_cast<std::size_t>(std::ceil(2 * rho)) + 4;
    for (auto& x : cav.center) x = static_cast<double>(n - 1) / 2 + jitter(rng) - 0.5;
    BinaryGrid g(Dims4::cube(n), 1);
    const double carved = static_cast<double>(carve(g, cav));
    const double dev = std::abs(carved / hypervolume(cav.shape) - 1.0);
    worst[kind] = std::max(worst[kind], dev);
  }
  double top = 0;
  std::string d;
  for (const auto& [k, v] : worst) {
    top = std::max(top, v);
    d += (d.empty() ? "" : ", ") + std::string(kind_name(k)) + " " + fmt("%.1f%%", 100 * v);
  }
  return {top < 0.10, "20 cavities, worst relative deviation " + d};
}

using TD = Tensor<double>;

TD random_tensor(Shape s, std::uint64_t seed, double lo = -1, double hi = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  TD t(std::move(s));
  for (auto& v : t.data) v = u(rng);
  return t;
}

double dot(const TD& a, const TD& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double fd_error(TD& x, const TD& g, const std::function<double()>& f) {
  const double h = 1e-5;
  double worst = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = f();
    x[i] = keep - h;
    const double down = f();
    x[i] = keep;
    const double num = (up - down) / (2 * h);
    worst = std::max(worst, std::abs(num - g[i]) / std::max({std::abs(num), std::abs(g[i]), 1e-3}));
  }
  return worst;
}

Outcome gradients() {
  std::map<std::string, double> err;
  {
    TD x = random_tensor({1, 2, 4, 4, 4, 4}, 1);
    TD w = random_tensor({2, 2, 5, 5, 5, 5}, 2, -0.2, 0.2);
    TD b = random_tensor({2}, 3);
    const TD up = random_tensor({1, 2, 4, 4, 4, 4}, 4);
    const auto g = conv4d_backward(x, w, up, 2);
    const auto f = [&] { return dot(conv4d_forward(x, w, b, 2), up); };
    err["conv x"] = fd_error(x, g.x, f);
    err["conv w"] = fd_error(w, g.w, f);
    err["conv b"] = fd_error(b, g.b, f);
  }
  {
    TD x = random_tensor({2, 2, 4, 4, 2, 2}, 5);
    const TD up = random_tensor({2, 2, 2, 2, 1, 1}, 6);
    std::vector<std::uint32_t> am;
    maxpool4d(x, am);
    const TD g = maxpool4d_backward(x.shape, am, up);
    err["maxpool"] = fd_error(x, g, [&] {
      std::vector<std::uint32_t> a;
      return dot(maxpool4d(x, a), up);
    });
  }
  {
    TD x = random_tensor({3, 7}, 7);
    for (auto& v : x.data) v = std::abs(v) < 0.05 ? 0.3 : v;  // keep clear of the kink
    const TD up = random_tensor({3, 7}, 8);
    err["relu"] = fd_error(x, relu_backward(x, up), [&] { return dot(relu(x), up); });
  }
  {
    TD x = random_tensor({3, 6}, 9);
    TD w = random_tensor({4, 6}, 10);
    TD b = random_tensor({4}, 11);
    const TD up = random_tensor({3, 4}, 12);
    const auto g = linear_backward(x, w, up);
    const auto f = [&] { return dot(linear_forward(x, w, b), up); };
    err["linear x"] = fd_error(x, g.x, f);
    err["linear w"] = fd_error(w, g.w, f);
    err["linear b"] = fd_error(b, g.b, f);
  }
  {
    TD z = random_tensor({3, 53}, 13, -2, 2);
    const std::vector<BettiVector> t{{{1, 0, 2, 5}}, {{0, 16, 1, 3}}, {{1, 7, 16, 0}}};
    err["loss"] = fd_error(z, multihead_loss(z, t).grad, [&] { return multihead_loss(z, t).loss; });
  }
  {
    Model<double> m(CNNConfig{4, {2, 3}, 5, 2, 2, 5, kDefaultHeads});
    m.initialize(14);
    for (std::size_t i = 1; i < m.params().size(); i += 2)
      for (auto& v : m.params()[i].data) v = 0.05;
    const TD x = random_tensor({2, 1, 4, 4, 4, 4}, 15, 0, 1);
    const std::vector<BettiVector> t{{{1, 2, 0, 3}}, {{1, 0, 4, 1}}};
    Model<double>::Cache cache;
    const auto r = multihead_loss(m.forward(x, &cache), t);
    m.zero_grad();
    m.backward(cache, r.grad);
    const auto f = [&] { return multihead_loss(m.forward(x), t).loss; };
    double worst = 0;
    for (std::size_t i = 0; i < m.params().size(); ++i) worst = std::max(worst, fd_error(m.params()[i], m.grads()[i], f));
    err["model"] = worst;
  }
  double top = 0;
  std::string name;
  for (const auto& [k, v] : err) {
    if (v >= top) {
      top = v;
      name = k;
    }
  }
  return {top < 1e-4, std::to_string(err.size()) + " checks, worst relative error " + fmt("%.2e", top) + " (" + name + ")"};
}

// One-sided exact binomial tail P(X >= k) for X ~ Bin(n, p).
double binomial_upper_tail(std::size_t k, std::size_t n, double p) {
  double s = 0;
  for (std::size_t i = k; i <= n; ++i) {
    const double di = static_cast<double>(i), dn = static_cast<double>(n);
    s += std::exp(std::lgamma(dn + 1) - std::lgamma(di + 1) - std::lgamma(dn - di + 1) + di * std::log(p) +
                  (dn - di) * std::log1p(-p));
  }
  return s;
}

// One or three Ball4 cavities at 64^4, average-pooled to 16^4.
Dataset ball_count_dataset(std::size_t n, std::uint64_t seed) {
  GenConfig cfg;
  cfg.grid_size = 64;
  cfg.kind_weights = {1, 0, 0, 0};
  cfg.a_min = 2.8;
  cfg.a_max = 3.6;
  cfg.spacing = 4.0;
  Dataset d;
  for (std::size_t i = 0; i < n; ++i) {
    cfg.min_holes = cfg.max_holes = i % 2 ? 3 : 1;
    const Sample s = generate_indexed(seed, i, cfg);
    d.grids.push_back(avgpool(s.grid, 4));
    d.labels.push_back(s.label.betti);
  }
  return d;
}

Outcome learnability() {
  const auto t0 = std::chrono::steady_clock::now();
  const Dataset d = ball_count_dataset(300, 1010);
  log("  toy dataset ready");

  // (a) memorize ten samples.
  Dataset ten;
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> lab(0, 16);
  for (std::size_t i = 0; i < 10; ++i) {
    ten.grids.push_back(d.grids[i]);
    ten.labels.push_back({{1, lab(rng), lab(rng), d.labels[i][3]}});
  }
  TrainConfig mt;
  mt.epochs = 200;
  mt.batch_size = 10;
  mt.lr = 1e-3;
  mt.lr_drop_epochs = {};
  mt.split = {1.0, 0.0, 0.0};
  mt.augment = false;
  const TrainResult mem = train(ten, desk_cnn_config(16), mt);
  const double mem_loss = mem.history.back().train_loss;
  const double mem_complete = evaluate(mem.checkpoint.model, ten).complete;
  log("  memorization loss " + fmt("%.4f", mem_loss));

  // (b) held-out cavity count against the majority baseline.
  TrainConfig t = TrainConfig::desk(DownscaleMode::AvgPool, 30);
  t.lr = 1e-3;
  t.split = {0.7, 0.0, 0.3};
  t.seed = 12;
  const TrainResult r = train(d, desk_cnn_config(16), t, [](const EpochMetrics& m) {
    log("  epoch " + std::to_string(m.epoch) + " loss " + fmt("%.4f", m.train_loss));
  });
  const auto pred = predict_all(r.checkpoint.model, d.grids, r.split.test);
  std::size_t correct = 0, ones = 0;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    const BettiVector& truth = d.labels[r.split.test[k]];
    correct += pred[k][3] == truth[3] ? 1 : 0;
    ones += truth[3] == 1 ? 1 : 0;
  }
  const std::size_t n = pred.size();
  const double base = static_cast<double>(std::max(ones, n - ones)) / static_cast<double>(n);
  const double p = binomial_upper_tail(correct, n, base);
  const double mins = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / 60;
  std::ostringstream s;
  s << "memorize 10: loss " << fmt("%.4f", mem_loss) << ", complete " << fmt("%.0f%%", mem_complete)
    << "; toy b3 " << correct << "/" << n << " vs baseline " << fmt("%.3f", base) << ", p = " << fmt("%.2e", p)
    << "; " << fmt("%.0f", mins) << " min";
  return {mem_loss < 0.05 && mem_complete == 100.0 && p < 0.05 && mins <= 120, s.str()};
}

std::string grid_bytes(const AnyGrid& g) {
  std::ostringstream o;
  write_grid(o, g);
  return o.str();
}

Outcome determinism() {
  std::vector<std::string> bad;
  GenConfig cfg;
  cfg.grid_size = 32;
  cfg.max_holes = 3;
  cfg.spacing = 2;
  for (std::size_t i = 0; i < 5; ++i) {
    const Sample a = generate_indexed(1111, i, cfg), b = generate_indexed(1111, i, cfg);
    if (grid_bytes(a.grid) != grid_bytes(b.grid) || label_to_json(a.label) != label_to_json(b.label)) bad.push_back("generation");
  }

  const fs::path root = fs::temp_directory_path() / "toxel_acceptance";
  fs::remove_all(root);
  generate_batch(1112, 6, cfg, root / "j1", 1);
  generate_batch(1112, 6, cfg, root / "j3", 3);
  for (const auto& e : fs::directory_iterator(root / "j1")) {
    if (read_text(e.path()) != read_text(root / "j3" / e.path().filename())) bad.push_back("batch " + e.path().filename().string());
  }

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<float> u(0, 1);
  FloatGrid f(Dims4{{3, 5, 2, 7}});
  for (auto& v : f.data()) v = u(rng);
  const BinaryGrid bin = generate_indexed(1113, 0, cfg).grid;
  write_grid_file(root / "f.tox4", f);
  write_grid_file(root / "b.tox4", bin);
  if (std::get<FloatGrid>(read_grid_file(root / "f.tox4")) != f) bad.push_back("float grid round trip");
  if (as_binary(read_grid_file(root / "b.tox4")) != bin) bad.push_back("binary grid round trip");
  if (grid_bytes(read_grid_file(root / "f.tox4")) != read_text(root / "f.tox4")) bad.push_back("float grid bytes");

  Dataset d;
  for (std::size_t i = 0; i < 8; ++i) {
    FloatGrid g(Dims4::cube(8));
    for (auto& v : g.data()) v = u(rng) < 0.5f ? 0.0f : 1.0f;
    d.grids.push_back(g);
    d.labels.push_back({{1, static_cast<int>(i % 3), 0, static_cast<int>(i % 5)}});
  }
  TrainConfig t;
  t.epochs = 3;
  t.batch_size = 3;
  t.lr_drop_epochs = {2};
  t.split = {0.75, 0.25, 0.0};
  t.seed = 99;
  CNNConfig c{8, {2, 4}, 5, 2, 2, 16, kDefaultHeads};
  const TrainResult r1 = train(d, c, t), r2 = train(d, c, t);
  const std::string bytes = serialize_checkpoint(r1.checkpoint);
  if (bytes != serialize_checkpoint(r2.checkpoint)) bad.push_back("training");
  save_checkpoint(root / "m.toxn", r1.checkpoint);
  if (serialize_checkpoint(load_checkpoint<float>(root / "m.toxn")) != bytes || read_text(root / "m.toxn") != bytes) {
    bad.push_back("checkpoint round trip");
  }
  fs::remove_all(root);
  std::string detail = "generation, batch (jobs 1 vs 3), training, grid and checkpoint files";
  if (!bad.empty()) {
    detail = "mismatch:";
    for (const auto& s : bad) detail += " " + s;
  }
  return {bad.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  // Criterion 4 runs last so it can tally the grids reduced by the others.
  const std::vector<std::pair<int, std::function<Outcome()>>> order{
      {1, radius_ranges},   {7, combined_formula},     {9, gradients},   {8, hypervolumes},
      {3, single_cavities}, {5, cross_oracles},        {6, downscale_disruption},
      {2, label_soundness}, {11, determinism},         {10, learnability}, {4, euler_identity}};
  const std::map<int, std::string> names{
      {1, "radius ranges"},       {2, "label soundness"},   {3, "single-cavity homology"},
      {4, "Euler identity"},      {5, "cross-oracle agreement"}, {6, "downscaling disruption"},
      {7, "combined accuracy"},   {8, "hypervolume consistency"}, {9, "gradient correctness"},
      {10, "desk-scale learnability"}, {11, "determinism and round trips"}};

  std::map<int, Outcome> results;
  for (const auto& [id, fn] : order) {
    if (!only.empty() && !only.count(id)) continue;
    log("criterion " + std::to_string(id) + ": " + names.at(id));
    try {
      results[id] = fn();
    } catch (const std::exception& e) {
      results[id] = {false, std::string("error: ") + e.what()};
    }
    log("  -> " + std::string(results[id].pass ? "PASS" : "FAIL") + " " + results[id].detail);
  }
  bool all = true;
  for (const auto& [id, r] : results) {
    std::cout << (r.pass ? "PASS" : "FAIL") << " " << id << " " << names.at(id) << ": " << r.detail << "\n";
    all = all && r.pass;
  }
  return all ? 0 : 1;
}
