#include "dynalloc/fes_identify.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <random>

#include <Eigen/QR>

#include "dynalloc/errors.hpp"

namespace dynalloc {

std::vector<double> default_intensities(const FesModel& model) {
  std::vector<double> out;
  for (int k = 1; k <= 5; ++k) {
    out.push_back(model.upsilon_min_ma + (model.upsilon_max_ma - model.upsilon_min_ma) * k / 5.0);
  }
  return out;
}

TrainingGrid generate_grid(const FesModel& truth, Muscle muscle, const GridProtocol& protocol) {
  truth.validate();
  if (protocol.repeats < 1 || !(protocol.stim_s > 0.0) || !(protocol.rest_s >= 0.0)) {
    throw ConfigError("grid protocol: invalid timing");
  }
  if (!(protocol.sim_dt > 0.0) || !(protocol.sample_hz > 0.0)) throw ConfigError("grid protocol: invalid rates");
  const auto decimate = static_cast<long>(std::llround(1.0 / (protocol.sample_hz * protocol.sim_dt)));
  if (decimate < 1) throw ConfigError("grid protocol: sample rate above simulation rate");
  const std::vector<double> levels =
      protocol.intensities_ma.empty() ? default_intensities(truth) : protocol.intensities_ma;

  const auto stim_ticks = std::llround(protocol.stim_s / protocol.sim_dt);
  const auto rest_ticks = std::llround(protocol.rest_s / protocol.sim_dt);

  std::mt19937_64 rng(protocol.seed);
  std::normal_distribution<double> noise(0.0, 1.0);

  TrainingGrid grid;
  long long tick = 0;
  for (double angle : protocol.angles_deg) {
    FesChannel channel(truth, muscle, protocol.sim_dt);
    for (double level : levels) {
      for (int rep = 0; rep < protocol.repeats; ++rep) {
        for (long long i = 0; i < stim_ticks + rest_ticks; ++i, ++tick) {
          const double upsilon = i < stim_ticks ? level : 0.0;
          const double torque = channel.step(upsilon, angle);
          if (tick % decimate != 0) continue;
          double measured = torque;
          if (protocol.noise_nm > 0.0) measured += protocol.noise_nm * noise(rng);
          grid.push_back({muscle, upsilon, angle, static_cast<double>(tick) * protocol.sim_dt, measured});
        }
      }
    }
  }
  return grid;
}

namespace {

struct Segment {
  double angle = 0.0;
  std::vector<double> t;
  std::vector<double> upsilon;
  std::vector<double> torque;  // magnitude convention, flexion positive
  std::vector<double> level;   // Hammerstein input (steady torque of the cell)
};

double median_step(const std::vector<TrainingSample>& s) {
  std::vector<double> d;
  for (std::size_t i = 1; i < s.size(); ++i) {
    const double dt = s[i].t_s - s[i - 1].t_s;
    if (dt > 0.0) d.push_back(dt);
  }
  if (d.empty()) throw IdentificationError("identify: cannot infer the sample period");
  std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2), d.end());
  return d[d.size() / 2];
}

double key(double v) { return std::round(v * 1e6) / 1e6; }

// Zero-delay response of the fitted dynamics sampled every `h` along a segment.
std::vector<double> simulate_fine(const ActivationDynamics& dyn, const Segment& seg, int sub, double h) {
  std::vector<double> y;
  y.reserve(seg.level.size() * static_cast<std::size_t>(sub));
  ActivationState a = ActivationState::Zero();
  for (double u : seg.level) {
    for (int j = 0; j < sub; ++j) {
      y.push_back(a[0]);
      a = activation_step(dyn, a, u, h);
    }
  }
  return y;
}

}  // namespace

IdentifyResult identify(const TrainingGrid& grid, Muscle muscle, const IdentifyOptions& options) {
  if (!(options.bandwidth_hint_hz > 0.0)) throw ConfigError("identify: bandwidth hint must be positive");
  if (!(options.steady_fraction > 0.0 && options.steady_fraction <= 1.0)) {
    throw ConfigError("identify: steady fraction must lie in (0, 1]");
  }
  if (!(options.psi > 0.0 && options.psi <= 1.0)) throw ConfigError("identify: psi must lie in (0, 1]");

  std::vector<TrainingSample> samples;
  for (const auto& s : grid) {
    if (s.muscle != muscle) continue;
    if (!std::isfinite(s.upsilon_ma) || !std::isfinite(s.theta_deg) || !std::isfinite(s.t_s) ||
        !std::isfinite(s.torque_nm)) {
      throw InvalidInput("identify: non-finite training sample");
    }
    samples.push_back(s);
  }
  if (samples.size() < 3) throw IdentificationError("identify: no training data for " + to_string(muscle));
  std::stable_sort(samples.begin(), samples.end(),
                   [](const TrainingSample& a, const TrainingSample& b) { return a.t_s < b.t_s; });

  const double period = median_step(samples);
  const double sign = muscle_sign(muscle);

  std::vector<Segment> segments;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    const bool split = i == 0 || key(s.theta_deg) != key(samples[i - 1].theta_deg) ||
                       s.t_s - samples[i - 1].t_s > 1.5 * period;
    if (split) segments.push_back(Segment{s.theta_deg, {}, {}, {}, {}});
    segments.back().t.push_back(s.t_s);
    segments.back().upsilon.push_back(s.upsilon_ma);
    segments.back().torque.push_back(sign * s.torque_nm);
  }

  // Steady torque per (angle, intensity) from the tail of each stimulation run.
  std::map<double, std::map<double, std::pair<double, int>>> cells;
  for (const auto& seg : segments) {
    std::size_t i = 0;
    while (i < seg.upsilon.size()) {
      if (!(seg.upsilon[i] > 0.0)) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < seg.upsilon.size() && seg.upsilon[j] == seg.upsilon[i]) ++j;
      const std::size_t len = j - i;
      const auto tail = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(options.steady_fraction * len)));
      double sum = 0.0;
      for (std::size_t k = j - tail; k < j; ++k) sum += seg.torque[k];
      auto& cell = cells[key(seg.angle)][key(seg.upsilon[i])];
      cell.first += sum / static_cast<double>(tail);
      cell.second += 1;
      i = j;
    }
  }

  if (cells.size() < 2) throw IdentificationError("identify: need at least two distinct angles");

  IdentifyResult result;
  FesModel& model = result.model;
  model.fatigue_psi = options.psi;

  double lowest = std::numeric_limits<double>::infinity();
  double highest = 0.0;
  for (const auto& [angle, row] : cells) {
    if (row.size() < 2) throw IdentificationError("identify: need at least two distinct intensities per angle");
    lowest = std::min(lowest, row.begin()->first);
    highest = std::max(highest, row.rbegin()->first);
  }
  const double upsilon_min = options.upsilon_min_ma.value_or(lowest);
  if (upsilon_min > lowest || upsilon_min < 0.0) {
    throw ConfigError("identify: motor threshold must lie in [0, lowest training intensity]");
  }
  model.upsilon_min_ma = upsilon_min;
  model.upsilon_max_ma = highest;

  std::vector<double> angles;
  std::vector<double> peaks;
  std::vector<MonotoneSpline> curves;
  std::map<double, std::map<double, double>> steady;
  for (const auto& [angle, row] : cells) {
    double peak = 0.0;
    for (const auto& [u, acc] : row) {
      const double mean = acc.first / acc.second;
      steady[angle][u] = mean;
      peak = std::max(peak, mean);
    }
    if (!(peak > 1e-9)) {
      throw IdentificationError("identify: degenerate contraction map (no torque at " + std::to_string(angle) +
                                " deg)");
    }
    std::vector<double> u;
    std::vector<double> r;
    if (upsilon_min < row.begin()->first) {
      u.push_back(upsilon_min);
      r.push_back(0.0);
    }
    for (const auto& [level, value] : steady[angle]) {
      u.push_back(level);
      r.push_back(level == upsilon_min ? 0.0 : value / peak);
    }
    double dip = 0.0;
    double running = r.front();
    for (double v : r) {
      dip = std::max(dip, running - v);
      running = std::max(running, v);
    }
    if (dip > options.monotone_tolerance) {
      result.warnings.push_back("non-monotone recruitment at " + std::to_string(angle) + " deg (dip " +
                                std::to_string(dip) + "), monotone regression applied");
    }
    r = isotonic_regression(r);
    for (double& v : r) v = std::clamp(v, 0.0, 1.0);
    angles.push_back(angle);
    peaks.push_back(peak / options.psi);
    curves.emplace_back(std::move(u), std::move(r));
  }
  model.recruitment = RecruitmentMap(angles, std::move(curves));
  model.contraction = ContractionMap(std::move(angles), std::move(peaks));

  for (auto& seg : segments) {
    seg.level.resize(seg.upsilon.size());
    const auto& row = steady.at(key(seg.angle));
    for (std::size_t k = 0; k < seg.upsilon.size(); ++k) {
      seg.level[k] = seg.upsilon[k] > 0.0 ? row.at(key(seg.upsilon[k])) : 0.0;
    }
  }

  // Second-order ARX with an FIR input window long enough to absorb the delay.
  const double fs = 1.0 / period;
  const int dec = std::max(1, static_cast<int>(std::floor(fs / (20.0 * options.bandwidth_hint_hz))));
  const double td = dec * period;
  const int nb = static_cast<int>(std::ceil(options.max_delay_s / td)) + 3;
  const int start = std::max(2, nb);
  const int cols = 2 + nb;

  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  for (const auto& seg : segments) {
    std::vector<double> y;
    std::vector<double> u;
    for (std::size_t k = 0; k < seg.torque.size(); k += static_cast<std::size_t>(dec)) {
      y.push_back(seg.torque[k]);
      u.push_back(seg.level[k]);
    }
    for (int k = start; k < static_cast<int>(y.size()); ++k) {
      std::vector<double> row(static_cast<std::size_t>(cols));
      row[0] = y[static_cast<std::size_t>(k - 1)];
      row[1] = y[static_cast<std::size_t>(k - 2)];
      for (int j = 1; j <= nb; ++j) row[static_cast<std::size_t>(1 + j)] = u[static_cast<std::size_t>(k - j)];
      rows.push_back(std::move(row));
      rhs.push_back(y[static_cast<std::size_t>(k)]);
    }
  }
  if (rows.size() < static_cast<std::size_t>(cols)) throw IdentificationError("identify: too few samples for dynamics");

  Eigen::MatrixXd phi(static_cast<Eigen::Index>(rows.size()), cols);
  Eigen::VectorXd target(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int j = 0; j < cols; ++j) phi(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
    target[static_cast<Eigen::Index>(i)] = rhs[i];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(phi);
  qr.setThreshold(1e-10);
  if (qr.rank() < cols) throw IdentificationError("identify: rank-deficient dynamics regression");
  const Eigen::VectorXd theta = qr.solve(target);

  const double a1 = theta[0];
  const double a2 = theta[1];
  const std::complex<double> disc = std::sqrt(std::complex<double>(a1 * a1 + 4.0 * a2, 0.0));
  const std::complex<double> z1 = 0.5 * (a1 + disc);
  const std::complex<double> z2 = 0.5 * (a1 - disc);
  const auto to_s = [&](std::complex<double> z) {
    if (!(std::abs(z) < 1.0) || (z.imag() == 0.0 && z.real() <= 0.0)) {
      throw IdentificationError("identify: fitted activation dynamics are unstable");
    }
    return std::log(z) / td;
  };
  const std::complex<double> s1 = to_s(z1);
  const std::complex<double> s2 = to_s(z2);
  const double wn2 = (s1 * s2).real();
  const double two_zeta_wn = -(s1 + s2).real();
  if (!(wn2 > 0.0) || !(two_zeta_wn > 0.0)) throw IdentificationError("identify: fitted activation dynamics are unstable");
  model.activation.A << 0.0, 1.0, -wn2, -two_zeta_wn;
  model.activation.B << 0.0, wn2;

  // Delay: lag of the zero-delay model response that best matches the data.
  const int sub = std::max(1, static_cast<int>(std::llround(period / 1e-3)));
  const double h = period / sub;
  const int max_lag = static_cast<int>(std::ceil(options.max_delay_s / h));
  std::vector<double> cost(static_cast<std::size_t>(max_lag + 1), 0.0);
  for (const auto& seg : segments) {
    const std::vector<double> y0 = simulate_fine(model.activation, seg, sub, h);
    for (int lag = 0; lag <= max_lag; ++lag) {
      double c = 0.0;
      for (std::size_t k = 0; k < seg.torque.size(); ++k) {
        const long idx = static_cast<long>(k) * sub - lag;
        const double pred = idx >= 0 ? y0[static_cast<std::size_t>(idx)] : 0.0;
        const double e = seg.torque[k] - pred;
        c += e * e;
      }
      cost[static_cast<std::size_t>(lag)] += c;
    }
  }
  const auto best = static_cast<int>(std::min_element(cost.begin(), cost.end()) - cost.begin());
  double lag = best;
  if (best > 0 && best < max_lag) {
    const double cm = cost[static_cast<std::size_t>(best - 1)];
    const double c0 = cost[static_cast<std::size_t>(best)];
    const double cp = cost[static_cast<std::size_t>(best + 1)];
    const double curv = cm - 2.0 * c0 + cp;
    if (curv > 0.0) lag += 0.5 * (cm - cp) / curv;
  }
  model.delay_s = std::max(options.min_delay_s, lag * h);

  model.validate();
  return result;
}

}  // namespace dynalloc
