#include "spike/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "spike/errors.hpp"

namespace spike::io {

namespace {

// Line reader with 1-based numbering. Blank lines end the data; only blank
// lines may follow.
class Lines {
 public:
  Lines(std::istream& in, std::string kind) : in_(in), kind_(std::move(kind)) {}

  // Next line split on whitespace; throws at end of input.
  std::vector<std::string_view> next(std::size_t expected) {
    std::vector<std::string_view> tok;
    if (!try_next(tok)) fail(end_line_, "unexpected end of data");
    if (expected && tok.size() != expected)
      fail(line_, "expected " + std::to_string(expected) + " fields, found " + std::to_string(tok.size()));
    return tok;
  }

  // False at end of input or at a blank line followed only by blank lines.
  bool try_next(std::vector<std::string_view>& tok) {
    if (!std::getline(in_, buf_)) {
      end_line_ = line_ + 1;
      return false;
    }
    ++line_;
    if (!buf_.empty() && buf_.back() == '\r') buf_.pop_back();
    tok.clear();
    std::string_view s(buf_);
    std::size_t i = 0;
    while (i < s.size()) {
      while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
      std::size_t j = i;
      while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
      if (j > i) tok.push_back(s.substr(i, j - i));
      i = j;
    }
    if (tok.empty()) {
      end_line_ = line_;
      expect_end();
      return false;
    }
    return true;
  }

  void expect_end() {
    std::string rest;
    while (std::getline(in_, rest)) {
      ++line_;
      if (rest.find_first_not_of(" \t\r") != std::string::npos) fail(line_, "trailing content");
    }
  }

  double real(std::string_view t) const {
    double v = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size()) fail(line_, "not a number: '" + std::string(t) + "'");
    if (!std::isfinite(v)) fail(line_, "non-finite value");
    return v;
  }

  long integer(std::string_view t) const {
    long v = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size()) fail(line_, "not an integer: '" + std::string(t) + "'");
    return v;
  }

  int line() const { return line_; }
  [[noreturn]] void fail(int line, const std::string& msg) const { throw FormatError(kind_, line, msg); }

 private:
  std::istream& in_;
  std::string kind_;
  std::string buf_;
  int line_ = 0;
  int end_line_ = 0;
};

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidParameter, "cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidParameter, "cannot read " + path.string());
  return in;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw Error(ErrorKind::InvalidParameter, "write failed: " + path.string());
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_mesh(std::ostream& out, const Mesh& mesh) {
  out << mesh.num_nodes() << ' ' << mesh.num_triangles() << '\n';
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
    const Point& p = mesh.node(static_cast<int>(i));
    out << format_double(p.x()) << ' ' << format_double(p.y()) << ' ' << (mesh.is_boundary(static_cast<int>(i)) ? 1 : 0)
        << '\n';
  }
  for (const Triangle& t : mesh.triangles()) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

Mesh read_mesh(std::istream& in) {
  Lines L(in, "mesh");
  auto head = L.next(2);
  long n = L.integer(head[0]), m = L.integer(head[1]);
  if (n < 3 || m < 1) L.fail(1, "need at least 3 nodes and 1 triangle");
  std::vector<Point> nodes;
  std::vector<char> flags;
  nodes.reserve(n);
  flags.reserve(n);
  for (long i = 0; i < n; ++i) {
    auto t = L.next(3);
    nodes.emplace_back(L.real(t[0]), L.real(t[1]));
    long f = L.integer(t[2]);
    if (f != 0 && f != 1) L.fail(L.line(), "boundary flag must be 0 or 1");
    flags.push_back(static_cast<char>(f));
  }
  std::vector<Triangle> tris;
  tris.reserve(m);
  for (long k = 0; k < m; ++k) {
    auto t = L.next(3);
    Triangle tri;
    for (int j = 0; j < 3; ++j) {
      long v = L.integer(t[j]);
      if (v < 0 || v >= n)
        L.fail(L.line(), "triangle index " + std::to_string(v) + " out of range [0, " + std::to_string(n) + ")");
      tri[j] = static_cast<int>(v);
    }
    const Point &a = nodes[tri[0]], &b = nodes[tri[1]], &c = nodes[tri[2]];
    if (!((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x() > 0))
      L.fail(L.line(), "triangle is not counter-clockwise with positive area");
    tris.push_back(tri);
  }
  L.expect_end();
  try {
    return Mesh(std::move(nodes), std::move(tris), std::move(flags));
  } catch (const FormatError&) {
    throw;
  } catch (const Error& e) {
    throw FormatError("mesh", 1, e.what());
  }
}

void write_field(std::ostream& out, const Field& u) {
  out << u.values.size() << '\n';
  for (Eigen::Index i = 0; i < u.values.size(); ++i) out << format_double(u.values[i]) << '\n';
}

Field read_field(std::istream& in, std::shared_ptr<const Mesh> mesh) {
  Lines L(in, "field");
  long n = L.integer(L.next(1)[0]);
  if (n != static_cast<long>(mesh->num_nodes()))
    L.fail(1, "node count " + std::to_string(n) + " does not match the mesh (" + std::to_string(mesh->num_nodes()) + ")");
  Eigen::VectorXd v(n);
  for (long i = 0; i < n; ++i) v[i] = L.real(L.next(1)[0]);
  L.expect_end();
  return Field(std::move(mesh), std::move(v));
}

void write_profile(std::ostream& out, const RadialProfile& p) {
  out << "# amplitude theta r_max\n";
  out << "# " << format_double(p.amplitude()) << ' ' << format_double(p.theta) << ' ' << format_double(p.r_max()) << '\n';
  for (std::size_t i = 0; i < p.r().size(); ++i)
    out << format_double(p.r()[i]) << ' ' << format_double(p.w()[i]) << ' ' << format_double(p.dw()[i]) << '\n';
}

RadialProfile read_profile(std::istream& in) {
  Lines L(in, "profile");
  auto h = L.next(4);
  if (h[0] != "#" || h[1] != "amplitude" || h[2] != "theta" || h[3] != "r_max")
    L.fail(1, "expected header '# amplitude theta r_max'");
  auto v = L.next(4);
  if (v[0] != "#") L.fail(2, "expected '# <amplitude> <theta> <r_max>'");
  const double amplitude = L.real(v[1]), theta = L.real(v[2]), r_max = L.real(v[3]);
  std::vector<double> r, w, dw;
  for (std::vector<std::string_view> t; L.try_next(t);) {
    if (t.size() != 3) L.fail(L.line(), "expected 3 fields, found " + std::to_string(t.size()));
    r.push_back(L.real(t[0]));
    w.push_back(L.real(t[1]));
    dw.push_back(L.real(t[2]));
    if (r.size() == 1 && r[0] != 0.0) L.fail(L.line(), "grid must start at r = 0");
    if (r.size() > 1 && !(r.back() > r[r.size() - 2])) L.fail(L.line(), "radii must increase");
  }
  if (r.size() < 2) L.fail(L.line(), "need at least two samples");
  if (w.front() != amplitude) L.fail(2, "amplitude differs from w(0)");
  if (r.back() != r_max) L.fail(2, "r_max differs from the last radius");
  RadialProfile p(std::move(r), std::move(w), std::move(dw));
  p.theta = theta;
  return p;
}

const char* const kSweepHeader =
    "d,m_d,M_test,t0,dist_over_sqrtd,profile_sup_err,mu1,budget,refl_residual,angular_min,vertical_min,maxima_count";

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kSweepHeader << '\n';
  for (const SweepRow& r : rows) {
    const double v[] = {r.d, r.m_d, r.M_test, r.t0, r.concentration.dist_over_sqrtd, r.concentration.profile_sup_err,
                        r.concentration.mu1, r.budget, r.symmetry.reflection_residual, r.symmetry.angular_min,
                        r.symmetry.vertical_min};
    for (double x : v) out << format_double(x) << ',';
    out << r.symmetry.maxima_count << '\n';
  }
}

std::vector<SweepRow> read_sweep_csv(std::istream& in) {
  Lines L(in, "sweep csv");
  auto h = L.next(1);
  if (h[0] != kSweepHeader) L.fail(1, std::string("expected header ") + kSweepHeader);
  std::vector<SweepRow> rows;
  for (std::vector<std::string_view> t; L.try_next(t);) {
    if (t.size() != 1) L.fail(L.line(), "unexpected whitespace");
    std::vector<std::string_view> c;
    std::string_view s = t[0];
    for (std::size_t i = 0;;) {
      std::size_t j = s.find(',', i);
      c.push_back(s.substr(i, j == std::string_view::npos ? j : j - i));
      if (j == std::string_view::npos) break;
      i = j + 1;
    }
    if (c.size() != 12) L.fail(L.line(), "expected 12 columns, found " + std::to_string(c.size()));
    SweepRow r;
    r.d = L.real(c[0]);
    r.m_d = L.real(c[1]);
    r.M_test = L.real(c[2]);
    r.t0 = L.real(c[3]);
    r.concentration.dist_over_sqrtd = L.real(c[4]);
    r.concentration.profile_sup_err = L.real(c[5]);
    r.concentration.mu1 = L.real(c[6]);
    r.budget = L.real(c[7]);
    r.symmetry.d = r.d;
    r.symmetry.reflection_residual = L.real(c[8]);
    r.symmetry.angular_min = L.real(c[9]);
    r.symmetry.vertical_min = L.real(c[10]);
    r.symmetry.maxima_count = static_cast<int>(L.integer(c[11]));
    rows.push_back(r);
  }
  return rows;
}

const char* const kMoserHeader = "alpha,eps,value,classification";

void write_moser_csv(std::ostream& out, const SharpnessTable& t) {
  out << kMoserHeader << '\n';
  for (const SharpnessRow& row : t.rows)
    for (std::size_t i = 0; i < t.eps.size(); ++i)
      out << format_double(row.alpha) << ',' << format_double(t.eps[i]) << ',' << format_double(row.values[i]) << ','
          << to_string(row.growth) << '\n';
}

#define SPIKE_PATH_WRITER(name, type)                \
  void name(const fs::path& path, const type& x) { \
    std::ofstream out = open_out(path);            \
    name(out, x);                                  \
    finish(out, path);                             \
  }
SPIKE_PATH_WRITER(write_mesh, Mesh)
SPIKE_PATH_WRITER(write_field, Field)
SPIKE_PATH_WRITER(write_profile, RadialProfile)
SPIKE_PATH_WRITER(write_sweep_csv, std::vector<SweepRow>)
SPIKE_PATH_WRITER(write_moser_csv, SharpnessTable)
#undef SPIKE_PATH_WRITER

Mesh read_mesh(const fs::path& path) {
  std::ifstream in = open_in(path);
  return read_mesh(in);
}

Field read_field(const fs::path& path, std::shared_ptr<const Mesh> mesh) {
  std::ifstream in = open_in(path);
  return read_field(in, std::move(mesh));
}

RadialProfile read_profile(const fs::path& path) {
  std::ifstream in = open_in(path);
  return read_profile(in);
}

std::vector<SweepRow> read_sweep_csv(const fs::path& path) {
  std::ifstream in = open_in(path);
  return read_sweep_csv(in);
}

void write_json(const fs::path& path, const nlohmann::ordered_json& j) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
  finish(out, path);
}

nlohmann::ordered_json read_json(const fs::path& path) {
  std::ifstream in = open_in(path);
  try {
    return nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Format, path.string() + ": " + e.what());
  }
}

}  // namespace spike::io
