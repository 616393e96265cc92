// Copyright 2026 The koopid Authors
// SPDX-License-Identifier: Apache-2.0

#include "koopid/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

#include "koopid/error.hpp"
#include "koopid/io.hpp"

namespace koopid {

namespace {

std::string episode_id(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%03d", i);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, int line) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kIo, "episode csv line " + std::to_string(line) +
                                    ": cannot parse '" + s + "'");
  }
}

}  // namespace

void Episode::validate() const {
  KOOPID_CHECK(dt > 0.0, ErrorCode::kInvalidInput,
               "episode " + id + ": dt must be positive");
  KOOPID_CHECK(states.rows() >= 1 && states.cols() >= 1,
               ErrorCode::kInvalidInput, "episode " + id + ": empty states");
  KOOPID_CHECK(states.cols() == inputs.cols() + 1, ErrorCode::kDimension,
               "episode " + id + ": expected one more state column than input columns");
  KOOPID_CHECK(states.allFinite() && inputs.allFinite(), ErrorCode::kInvalidInput,
               "episode " + id + ": non-finite value");
}

Vector duffing_step(const DuffingParams& p, const Vector& x, double force) {
  KOOPID_CHECK(x.size() == 2, ErrorCode::kDimension,
               "duffing_step: state must be (position, velocity)");
  const double pos = x(0);
  const double vel = x(1);
  Vector next(2);
  next(0) = pos + p.dt * vel;
  next(1) = vel + p.dt *
                      (force - p.damping * vel - p.k_linear * pos -
                       p.k_cubic * pos * pos * pos) /
                      p.mass;
  return next;
}

double duffing_energy(const DuffingParams& p, const Vector& x) {
  const double pos = x(0);
  const double vel = x(1);
  return 0.5 * p.mass * vel * vel + 0.5 * p.k_linear * pos * pos +
         0.25 * p.k_cubic * pos * pos * pos * pos;
}

std::vector<Episode> generate_duffing(const DuffingRunConfig& cfg) {
  const DuffingParams& p = cfg.params;
  KOOPID_CHECK(p.mass > 0.0 && p.dt > 0.0, ErrorCode::kInvalidInput,
               "duffing: mass and dt must be positive");
  KOOPID_CHECK(cfg.steps >= 2, ErrorCode::kInvalidInput,
               "duffing: need at least 2 steps");
  KOOPID_CHECK(cfg.episodes >= 1, ErrorCode::kInvalidInput,
               "duffing: need at least one episode");
  std::vector<Episode> out;
  out.reserve(cfg.episodes);
  for (int ep = 0; ep < cfg.episodes; ++ep) {
    std::seed_seq seq{static_cast<std::uint64_t>(cfg.seed),
                      static_cast<std::uint64_t>(ep), std::uint64_t{0xD0FF}};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    Vector x(2);
    if (cfg.use_fixed_x0) {
      x = cfg.fixed_x0;
    } else {
      x(0) = cfg.x0_box * (2.0 * unit(rng) - 1.0);
      x(1) = cfg.x0_box * (2.0 * unit(rng) - 1.0);
    }

    const ForcingSpec& f = cfg.forcing;
    std::vector<double> freq, phase;
    double sin_phase = 0.0;
    if (f.kind == ForcingKind::kRandom) {
      for (int c = 0; c < f.components; ++c) {
        freq.push_back(0.1 + (f.max_frequency - 0.1) * unit(rng));
        phase.push_back(2.0 * std::numbers::pi * unit(rng));
      }
    } else if (f.kind == ForcingKind::kSinusoid) {
      sin_phase = 2.0 * std::numbers::pi * unit(rng);
    }
    auto force_at = [&](double t) {
      switch (f.kind) {
        case ForcingKind::kZero: return 0.0;
        case ForcingKind::kSinusoid:
          return f.amplitude * std::sin(f.frequency * t + sin_phase);
        case ForcingKind::kRandom: {
          double acc = 0.0;
          for (size_t c = 0; c < freq.size(); ++c) {
            acc += std::sin(freq[c] * t + phase[c]);
          }
          return freq.empty() ? 0.0
                              : f.amplitude * acc /
                                    std::sqrt(static_cast<double>(freq.size()));
        }
      }
      return 0.0;
    };

    Episode e;
    e.id = episode_id(ep);
    e.dt = p.dt;
    e.states.resize(2, cfg.steps + 1);
    e.inputs.resize(1, cfg.steps);
    e.states.col(0) = x;
    for (int k = 0; k < cfg.steps; ++k) {
      const double u = force_at(k * p.dt);
      e.inputs(0, k) = u;
      x = duffing_step(p, x, u);
      if (!x.allFinite()) {
        throw Error(ErrorCode::kSimulationDiverged,
                    "duffing: episode " + e.id + " diverged at step " +
                        std::to_string(k + 1));
      }
      e.states.col(k + 1) = x;
    }
    out.push_back(std::move(e));
  }
  return out;
}

Episode add_noise(const Episode& e, const NoiseSpec& spec) {
  return add_noise(std::vector<Episode>{e}, spec).front();
}

std::vector<Episode> add_noise(const std::vector<Episode>& es,
                               const NoiseSpec& spec) {
  KOOPID_CHECK(!spec.std_dev.empty(), ErrorCode::kInvalidInput,
               "add_noise: no standard deviation given");
  for (double s : spec.std_dev) {
    KOOPID_CHECK(std::isfinite(s) && s >= 0.0, ErrorCode::kInvalidInput,
                 "add_noise: standard deviation must be finite and >= 0");
  }
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Episode> out = es;
  for (Episode& e : out) {
    const Eigen::Index m = e.states.rows();
    KOOPID_CHECK(spec.std_dev.size() == 1 ||
                     static_cast<Eigen::Index>(spec.std_dev.size()) == m,
                 ErrorCode::kDimension,
                 "add_noise: std_dev must have 1 or m entries");
    for (Eigen::Index k = 0; k < e.states.cols(); ++k) {
      for (Eigen::Index i = 0; i < m; ++i) {
        const double s = spec.std_dev.size() == 1 ? spec.std_dev[0]
                                                  : spec.std_dev[i];
        const double v = normal(rng);
        if (s > 0.0) e.states(i, k) += s * v;
      }
    }
  }
  return out;
}

namespace {

// Mean over channels of each channel's variance across every sample.
double pooled_variance(const std::vector<const Matrix*>& blocks) {
  if (blocks.empty()) return 0.0;
  const Eigen::Index m = blocks.front()->rows();
  double total = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    double sum = 0.0;
    double count = 0.0;
    for (const Matrix* b : blocks) {
      sum += b->row(i).sum();
      count += static_cast<double>(b->cols());
    }
    const double mean = sum / count;
    double ss = 0.0;
    for (const Matrix* b : blocks) {
      ss += (b->row(i).array() - mean).square().sum();
    }
    total += ss / count;
  }
  return total / static_cast<double>(m);
}

}  // namespace

double signal_variance(const std::vector<Episode>& episodes) {
  std::vector<const Matrix*> blocks;
  for (const Episode& e : episodes) blocks.push_back(&e.states);
  return pooled_variance(blocks);
}

double snr_db(const std::vector<Episode>& clean,
              const std::vector<Episode>& noisy) {
  KOOPID_CHECK(clean.size() == noisy.size() && !clean.empty(),
               ErrorCode::kDimension, "snr_db: episode count mismatch");
  std::vector<Matrix> diffs;
  std::vector<const Matrix*> signal;
  for (size_t i = 0; i < clean.size(); ++i) {
    KOOPID_CHECK(clean[i].states.rows() == noisy[i].states.rows() &&
                     clean[i].states.cols() == noisy[i].states.cols(),
                 ErrorCode::kDimension, "snr_db: shape mismatch");
    diffs.push_back(noisy[i].states - clean[i].states);
    signal.push_back(&clean[i].states);
  }
  std::vector<const Matrix*> noise;
  for (const Matrix& d : diffs) noise.push_back(&d);
  const double sn = pooled_variance(noise);
  if (sn <= 0.0) return kInfiniteSnr;
  return 10.0 * std::log10(pooled_variance(signal) / sn);
}

double snr_db(const Episode& clean, const Episode& noisy) {
  return snr_db(std::vector<Episode>{clean}, std::vector<Episode>{noisy});
}

double noise_std_for_snr(const std::vector<Episode>& clean, double target_db) {
  if (std::isinf(target_db) && target_db > 0) return 0.0;
  return std::sqrt(signal_variance(clean) / std::pow(10.0, target_db / 10.0));
}

std::vector<Episode> EpisodeSet::with_role(const std::string& role) const {
  std::vector<Episode> out;
  for (size_t i = 0; i < episodes.size(); ++i) {
    if (roles[i] == role) out.push_back(episodes[i]);
  }
  return out;
}

void EpisodeSet::validate() const {
  KOOPID_CHECK(roles.size() == episodes.size(), ErrorCode::kInvalidInput,
               "episode set: one role per episode required");
  for (const Episode& e : episodes) {
    e.validate();
    KOOPID_CHECK(e.state_dim() == state_dim && e.input_dim() == input_dim,
                 ErrorCode::kDimension,
                 "episode set: inconsistent dimensions in episode " + e.id);
  }
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string episode_to_csv(const Episode& e) {
  std::string out = "t";
  for (int i = 0; i < e.state_dim(); ++i) out += ",x" + std::to_string(i + 1);
  for (int i = 0; i < e.input_dim(); ++i) out += ",u" + std::to_string(i + 1);
  out += "\n";
  const Eigen::Index T = e.inputs.cols();
  for (Eigen::Index k = 0; k <= T; ++k) {
    out += format_double(static_cast<double>(k) * e.dt);
    for (Eigen::Index i = 0; i < e.states.rows(); ++i) {
      out += "," + format_double(e.states(i, k));
    }
    for (Eigen::Index i = 0; i < e.inputs.rows(); ++i) {
      out += ",";
      if (k < T) out += format_double(e.inputs(i, k));
    }
    out += "\n";
  }
  return out;
}

Episode episode_from_csv(const std::string& text, const std::string& id) {
  std::istringstream in(text);
  std::string line;
  KOOPID_CHECK(static_cast<bool>(std::getline(in, line)), ErrorCode::kIo,
               "episode " + id + ": empty csv");
  const auto header = split(line, ',');
  KOOPID_CHECK(!header.empty() && header[0] == "t", ErrorCode::kIo,
               "episode " + id + ": header must start with 't'");
  int m = 0;
  int n = 0;
  for (size_t c = 1; c < header.size(); ++c) {
    const std::string& h = header[c];
    if (!h.empty() && h[0] == 'x' && n == 0) {
      KOOPID_CHECK(h == "x" + std::to_string(m + 1), ErrorCode::kIo,
                   "episode " + id + ": unexpected column " + h);
      ++m;
    } else if (!h.empty() && h[0] == 'u') {
      KOOPID_CHECK(h == "u" + std::to_string(n + 1), ErrorCode::kIo,
                   "episode " + id + ": unexpected column " + h);
      ++n;
    } else {
      throw Error(ErrorCode::kIo, "episode " + id + ": unexpected column " + h);
    }
  }
  KOOPID_CHECK(m >= 1, ErrorCode::kIo, "episode " + id + ": no state columns");

  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    rows.push_back(split(line, ','));
  }
  KOOPID_CHECK(rows.size() >= 2, ErrorCode::kIo,
               "episode " + id + ": need at least two samples");
  const Eigen::Index T = static_cast<Eigen::Index>(rows.size()) - 1;
  Episode e;
  e.id = id;
  e.states.resize(m, T + 1);
  e.inputs.resize(n, T);
  std::vector<double> times;
  for (Eigen::Index k = 0; k <= T; ++k) {
    const auto& r = rows[k];
    const int line_no = static_cast<int>(k) + 2;
    KOOPID_CHECK(r.size() == header.size(), ErrorCode::kIo,
                 "episode " + id + " line " + std::to_string(line_no) +
                     ": wrong column count");
    times.push_back(parse_double(r[0], line_no));
    for (int i = 0; i < m; ++i) e.states(i, k) = parse_double(r[1 + i], line_no);
    for (int i = 0; i < n; ++i) {
      const std::string& cell = r[1 + m + i];
      if (k == T) {
        KOOPID_CHECK(cell.empty(), ErrorCode::kIo,
                     "episode " + id + ": final row input cells must be empty");
      } else {
        e.inputs(i, k) = parse_double(cell, line_no);
      }
    }
  }
  KOOPID_CHECK(times[0] == 0.0, ErrorCode::kIo,
               "episode " + id + ": first row must be at t = 0");
  e.dt = times[1] - times[0];
  e.validate();
  return e;
}

void write_episode_set(const EpisodeSet& set, const std::filesystem::path& dir) {
  set.validate();
  nlohmann::ordered_json meta;
  meta["dt"] = set.dt;
  meta["m"] = set.state_dim;
  meta["n"] = set.input_dim;
  nlohmann::ordered_json ids = nlohmann::ordered_json::array();
  nlohmann::ordered_json roles = nlohmann::ordered_json::object();
  for (size_t i = 0; i < set.episodes.size(); ++i) {
    const Episode& e = set.episodes[i];
    ids.push_back(e.id);
    roles[e.id] = set.roles[i];
    write_file_atomic(dir / ("episode_" + e.id + ".csv"), episode_to_csv(e));
  }
  meta["episode_ids"] = ids;
  meta["roles"] = roles;
  write_file_atomic(dir / "meta.json", meta.dump(2) + "\n");
}

EpisodeSet read_episode_set(const std::filesystem::path& dir) {
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(read_file(dir / "meta.json"));
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::kIo, "meta.json: " + std::string(ex.what()));
  }
  EpisodeSet set;
  try {
    set.dt = meta.at("dt").get<double>();
    set.state_dim = meta.at("m").get<int>();
    set.input_dim = meta.at("n").get<int>();
    for (const auto& id : meta.at("episode_ids")) {
      const std::string s = id.get<std::string>();
      Episode e = episode_from_csv(read_file(dir / ("episode_" + s + ".csv")), s);
      // The csv time column carries dt only to rounding; meta.json is exact.
      e.dt = set.dt;
      set.episodes.push_back(std::move(e));
      set.roles.push_back(meta.at("roles").at(s).get<std::string>());
    }
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::kIo, "meta.json: " + std::string(ex.what()));
  }
  set.validate();
  return set;
}

}  // namespace koopid
