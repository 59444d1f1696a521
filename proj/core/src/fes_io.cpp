#include "dynalloc/fes_io.hpp"

#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include "dynalloc/errors.hpp"
#include "dynalloc/text.hpp"

namespace dynalloc {

const FesModel& FesModelSet::get(Muscle m) const {
  const auto& slot = m == Muscle::flexor ? flexor : extensor;
  if (!slot) throw ConfigError("model set has no " + to_string(m) + " model");
  return *slot;
}

namespace {

void write_one(std::ostream& out, Muscle muscle, const FesModel& m) {
  const auto f = format_double;
  out << "muscle " << to_string(muscle) << '\n';
  out << "psi " << f(m.fatigue_psi) << '\n';
  out << "delay_s " << f(m.delay_s) << '\n';
  out << "upsilon_min_mA " << f(m.upsilon_min_ma) << '\n';
  out << "upsilon_max_mA " << f(m.upsilon_max_ma) << '\n';
  out << "activation_A " << f(m.activation.A(0, 0)) << ' ' << f(m.activation.A(0, 1)) << ' '
      << f(m.activation.A(1, 0)) << ' ' << f(m.activation.A(1, 1)) << '\n';
  out << "activation_B " << f(m.activation.B[0]) << ' ' << f(m.activation.B[1]) << '\n';
  const auto& ca = m.contraction.angles();
  out << "contraction_deg_Nm " << ca.size() << '\n';
  for (std::size_t i = 0; i < ca.size(); ++i) out << f(ca[i]) << ' ' << f(m.contraction.torques()[i]) << '\n';
  const auto& ra = m.recruitment.angles();
  out << "recruitment_angles " << ra.size() << '\n';
  for (std::size_t i = 0; i < ra.size(); ++i) {
    const auto& c = m.recruitment.curves()[i];
    out << "angle_deg " << f(ra[i]) << " knots " << c.knots().size() << '\n';
    for (std::size_t k = 0; k < c.knots().size(); ++k) out << f(c.knots()[k]) << ' ' << f(c.values()[k]) << '\n';
  }
  out << "end\n";
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next non-empty, non-comment line split into tokens; empty at EOF.
  std::vector<std::string> next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++number_;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      const auto toks = tokens(line);
      if (toks.empty()) continue;
      return {toks.begin(), toks.end()};
    }
    return {};
  }

  std::vector<std::string> expect(const std::string& key, std::size_t values) {
    auto t = next();
    if (t.empty() || t[0] != key || t.size() != values + 1) {
      fail("expected '" + key + "' with " + std::to_string(values) + " value(s)");
    }
    return t;
  }

  double number(const std::string& s) {
    try {
      return parse_double(s, "model file");
    } catch (const InvalidInput& e) {
      fail(e.what());
    }
  }
  std::size_t count(const std::string& s) {
    long long v = 0;
    try {
      v = parse_int(s, "model file");
    } catch (const InvalidInput& e) {
      fail(e.what());
    }
    if (v < 1) fail("count must be positive");
    return static_cast<std::size_t>(v);
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw InvalidInput("model file line " + std::to_string(number_) + ": " + what);
  }

 private:
  std::istream& in_;
  std::size_t number_ = 0;
};

FesModel read_one(LineReader& r) {
  FesModel m;
  m.fatigue_psi = r.number(r.expect("psi", 1)[1]);
  m.delay_s = r.number(r.expect("delay_s", 1)[1]);
  m.upsilon_min_ma = r.number(r.expect("upsilon_min_mA", 1)[1]);
  m.upsilon_max_ma = r.number(r.expect("upsilon_max_mA", 1)[1]);
  const auto a = r.expect("activation_A", 4);
  m.activation.A << r.number(a[1]), r.number(a[2]), r.number(a[3]), r.number(a[4]);
  const auto b = r.expect("activation_B", 2);
  m.activation.B << r.number(b[1]), r.number(b[2]);

  const std::size_t nc = r.count(r.expect("contraction_deg_Nm", 1)[1]);
  std::vector<double> ca, ct;
  for (std::size_t i = 0; i < nc; ++i) {
    const auto row = r.next();
    if (row.size() != 2) r.fail("expected 'angle torque' row");
    ca.push_back(r.number(row[0]));
    ct.push_back(r.number(row[1]));
  }

  const std::size_t na = r.count(r.expect("recruitment_angles", 1)[1]);
  std::vector<double> ra;
  std::vector<MonotoneSpline> curves;
  for (std::size_t i = 0; i < na; ++i) {
    const auto head = r.next();
    if (head.size() != 4 || head[0] != "angle_deg" || head[2] != "knots") r.fail("expected 'angle_deg <a> knots <n>'");
    ra.push_back(r.number(head[1]));
    const std::size_t nk = r.count(head[3]);
    std::vector<double> u, v;
    for (std::size_t k = 0; k < nk; ++k) {
      const auto row = r.next();
      if (row.size() != 2) r.fail("expected 'upsilon value' row");
      u.push_back(r.number(row[0]));
      v.push_back(r.number(row[1]));
    }
    try {
      curves.emplace_back(std::move(u), std::move(v));
    } catch (const InvalidInput& e) {
      r.fail(e.what());
    }
  }
  try {
    m.contraction = ContractionMap(std::move(ca), std::move(ct));
    m.recruitment = RecruitmentMap(std::move(ra), std::move(curves));
  } catch (const InvalidInput& e) {
    r.fail(e.what());
  }
  const auto end = r.next();
  if (end.size() != 1 || end[0] != "end") r.fail("expected 'end'");
  return m;
}

}  // namespace

void write_models(std::ostream& out, const FesModelSet& models) {
  out << "# dynalloc FES model: intensities mA, angles deg, torques N*m, time s\n";
  out << "format dynalloc-fes 1\n";
  if (models.flexor) write_one(out, Muscle::flexor, *models.flexor);
  if (models.extensor) write_one(out, Muscle::extensor, *models.extensor);
}

FesModelSet read_models(std::istream& in) {
  LineReader r(in);
  const auto header = r.next();
  if (header.size() != 3 || header[0] != "format" || header[1] != "dynalloc-fes" || header[2] != "1") {
    r.fail("expected 'format dynalloc-fes 1'");
  }
  FesModelSet set;
  for (auto t = r.next(); !t.empty(); t = r.next()) {
    if (t.size() != 2 || t[0] != "muscle") r.fail("expected 'muscle <flexor|extensor>'");
    Muscle m{};
    try {
      m = muscle_from_string(t[1]);
    } catch (const InvalidInput& e) {
      r.fail(e.what());
    }
    auto& slot = m == Muscle::flexor ? set.flexor : set.extensor;
    if (slot) r.fail("duplicate " + t[1] + " block");
    slot = read_one(r);
  }
  if (!set.flexor && !set.extensor) throw InvalidInput("model file contains no muscle");
  return set;
}

FesModelSet load_models(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model file '" + path + "'");
  return read_models(in);
}

void save_models(const std::string& path, const FesModelSet& models) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write model file '" + path + "'");
  write_models(out, models);
}

void write_training_csv(std::ostream& out, const TrainingGrid& grid) {
  out << "muscle,upsilon_mA,theta_deg,t_s,torque_Nm\n";
  for (const auto& s : grid) {
    out << to_string(s.muscle) << ',' << format_double(s.upsilon_ma) << ',' << format_double(s.theta_deg) << ','
        << format_double(s.t_s) << ',' << format_double(s.torque_nm) << '\n';
  }
}

TrainingGrid read_training_csv(std::istream& in) {
  static const std::vector<std::string> kColumns{"muscle", "upsilon_mA", "theta_deg", "t_s", "torque_Nm"};
  std::string line;
  std::size_t number = 0;
  std::map<std::string, std::size_t> index;
  while (std::getline(in, line)) {
    ++number;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto cols = split(t, ',');
    for (std::size_t i = 0; i < cols.size(); ++i) index[std::string(trim(cols[i]))] = i;
    break;
  }
  for (const auto& c : kColumns) {
    if (!index.count(c)) throw InvalidInput("training CSV: missing column '" + c + "'");
  }
  TrainingGrid grid;
  while (std::getline(in, line)) {
    ++number;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto cols = split(t, ',');
    if (cols.size() < index.size()) throw InvalidInput("training CSV line " + std::to_string(number) + ": too few fields");
    const auto field = [&](const std::string& name) { return trim(cols[index.at(name)]); };
    try {
      grid.push_back({muscle_from_string(std::string(field("muscle"))), parse_double(field("upsilon_mA"), "upsilon_mA"),
                      parse_double(field("theta_deg"), "theta_deg"), parse_double(field("t_s"), "t_s"),
                      parse_double(field("torque_Nm"), "torque_Nm")});
    } catch (const InvalidInput& e) {
      throw InvalidInput("training CSV line " + std::to_string(number) + ": " + e.what());
    }
  }
  return grid;
}

TrainingGrid load_training_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open training CSV '" + path + "'");
  return read_training_csv(in);
}

}  // namespace dynalloc
