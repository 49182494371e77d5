#include "coordhr/body_spec.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace coordhr {

ParseError::ParseError(int line, std::string field, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ", field '" + field + "': " + message),
      line_(line),
      field_(std::move(field)) {}

namespace {

struct Field {
  std::string key;
  std::string value;
  int line = 0;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<Field> split_fields(const std::string& text) {
  std::vector<Field> out;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string content = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) throw ParseError(line, content, "expected 'key = value'");
    Field f{trim(content.substr(0, eq)), trim(content.substr(eq + 1)), line};
    if (f.key.empty()) throw ParseError(line, "", "missing key");
    if (f.value.empty()) throw ParseError(line, f.key, "missing value");
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<double> parse_numbers(const Field& f, const std::string& text) {
  std::string s = text;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  std::vector<double> out;
  std::string token;
  while (in >> token) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size() || errno == ERANGE || !std::isfinite(v)) {
      throw ParseError(f.line, f.key, "not a finite number: '" + token + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw ParseError(f.line, f.key, "expected at least one number");
  return out;
}

class FieldSet {
 public:
  explicit FieldSet(std::vector<Field> fields, std::set<std::string> allowed)
      : fields_(std::move(fields)) {
    std::set<std::string> seen;
    for (const auto& f : fields_) {
      if (!allowed.count(f.key)) throw ParseError(f.line, f.key, "unknown field");
      if (f.key != "part" && !seen.insert(f.key).second) {
        throw ParseError(f.line, f.key, "duplicate field");
      }
    }
  }

  const Field* find(const std::string& key) const {
    for (const auto& f : fields_) {
      if (f.key == key) return &f;
    }
    return nullptr;
  }
  const Field& need(const std::string& key, int line_hint) const {
    if (const Field* f = find(key)) return *f;
    throw ParseError(line_hint, key, "required field is missing");
  }
  std::vector<const Field*> all(const std::string& key) const {
    std::vector<const Field*> out;
    for (const auto& f : fields_) {
      if (f.key == key) out.push_back(&f);
    }
    return out;
  }
  Vec vec(const std::string& key, int line_hint) const {
    const Field& f = need(key, line_hint);
    const auto v = parse_numbers(f, f.value);
    return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
  }
  double scalar(const std::string& key, int line_hint) const {
    const Field& f = need(key, line_hint);
    const auto v = parse_numbers(f, f.value);
    if (v.size() != 1) throw ParseError(f.line, key, "expected a single number");
    return v.front();
  }

 private:
  std::vector<Field> fields_;
};

ConvexBody build(const std::vector<Field>& fields, const std::filesystem::path& base_dir,
                 int depth);

ConvexBody build_checked(const std::vector<Field>& fields, const std::filesystem::path& base_dir,
                         int depth, int line_hint) {
  try {
    return build(fields, base_dir, depth);
  } catch (const ParseError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ParseError(line_hint, "kind", std::string("invalid body: ") + e.what());
  }
}

ConvexBody build(const std::vector<Field>& all_fields, const std::filesystem::path& base_dir,
                 int depth) {
  if (depth > 8) throw ParseError(0, "part", "parts nested too deeply");
  std::vector<Field> top;
  std::map<int, std::vector<Field>> inline_parts;
  for (const auto& f : all_fields) {
    if (f.key.rfind("part.", 0) == 0) {
      const auto dot = f.key.find('.', 5);
      if (dot == std::string::npos) throw ParseError(f.line, f.key, "expected part.<k>.<key>");
      int k = 0;
      try {
        k = std::stoi(f.key.substr(5, dot - 5));
      } catch (const std::exception&) {
        throw ParseError(f.line, f.key, "bad part index");
      }
      inline_parts[k].push_back({f.key.substr(dot + 1), f.value, f.line});
    } else {
      top.push_back(f);
    }
  }
  const int first_line = all_fields.empty() ? 0 : all_fields.front().line;
  const FieldSet fs(top, {"kind", "dim", "declared_R", "center", "halfwidths", "radius", "A",
                          "b", "corner", "scale", "part"});
  const std::string kind = fs.need("kind", first_line).value;
  const int kind_line = fs.need("kind", first_line).line;
  const double R = fs.find("declared_R") ? fs.scalar("declared_R", kind_line) : 1.0;

  std::optional<int> dim;
  if (const Field* d = fs.find("dim")) {
    const double v = fs.scalar("dim", d->line);
    if (v < 1 || v != std::floor(v)) throw ParseError(d->line, "dim", "must be a positive integer");
    dim = static_cast<int>(v);
  }
  auto check_dim = [&](Eigen::Index got, const std::string& key) {
    if (dim && got != *dim) {
      throw ParseError(fs.need(key, kind_line).line, key,
                       "has " + std::to_string(got) + " entries but dim = " + std::to_string(*dim));
    }
  };

  ConvexBody body = ConvexBody::cube(1);
  if (kind == "box") {
    const Vec c = fs.vec("center", kind_line);
    const Vec h = fs.vec("halfwidths", kind_line);
    check_dim(c.size(), "center");
    check_dim(h.size(), "halfwidths");
    if (c.size() != h.size()) {
      throw ParseError(fs.need("halfwidths", kind_line).line, "halfwidths", "size differs from center");
    }
    body = ConvexBody::box(c, h, R);
  } else if (kind == "euclidean_ball") {
    const Vec c = fs.vec("center", kind_line);
    check_dim(c.size(), "center");
    body = ConvexBody::euclidean_ball(c, fs.scalar("radius", kind_line), R);
  } else if (kind == "simplex") {
    const Vec c = fs.vec("corner", kind_line);
    check_dim(c.size(), "corner");
    body = ConvexBody::simplex(c, fs.scalar("scale", kind_line), R);
  } else if (kind == "h_polytope") {
    const Field& a = fs.need("A", kind_line);
    std::vector<std::vector<double>> rows;
    std::istringstream in(a.value);
    std::string row;
    while (std::getline(in, row, ';')) {
      if (trim(row).empty()) throw ParseError(a.line, "A", "empty row");
      rows.push_back(parse_numbers(a, row));
    }
    const std::size_t n = rows.front().size();
    for (const auto& r : rows) {
      if (r.size() != n) throw ParseError(a.line, "A", "rows have different lengths");
    }
    check_dim(static_cast<Eigen::Index>(n), "A");
    Eigen::MatrixXd A(rows.size(), n);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t j = 0; j < n; ++j) A(i, j) = rows[i][j];
    }
    const Vec b = fs.vec("b", kind_line);
    if (b.size() != A.rows()) throw ParseError(fs.need("b", kind_line).line, "b", "length differs from rows of A");
    body = ConvexBody::h_polytope(A, b, R);
  } else if (kind == "intersection") {
    std::vector<ConvexBody> parts;
    for (const auto& [k, pf] : inline_parts) {
      parts.push_back(build_checked(pf, base_dir, depth + 1, pf.front().line));
    }
    for (const Field* p : fs.all("part")) {
      const std::filesystem::path path = base_dir / p->value;
      std::ifstream in(path);
      if (!in) throw ParseError(p->line, "part", "cannot open '" + path.string() + "'");
      std::stringstream ss;
      ss << in.rdbuf();
      parts.push_back(build_checked(split_fields(ss.str()), path.parent_path(), depth + 1, p->line));
    }
    if (parts.empty()) throw ParseError(kind_line, "part", "intersection needs at least one part");
    if (dim && parts.front().dim() != *dim) throw ParseError(kind_line, "dim", "parts disagree with dim");
    body = ConvexBody::intersection(std::move(parts), R);
  } else {
    throw ParseError(kind_line, "kind", "unknown kind '" + kind + "'");
  }
  if (kind != "intersection" && !inline_parts.empty()) {
    throw ParseError(inline_parts.begin()->second.front().line, "part", "only intersections have parts");
  }
  return body;
}

void write_vec(std::ostream& out, const std::string& prefix, const std::string& key, const Vec& v) {
  out << prefix << key << " =";
  for (Eigen::Index i = 0; i < v.size(); ++i) out << ' ' << v(i);
  out << '\n';
}

void serialize_into(std::ostream& out, const ConvexBody& body, const std::string& prefix) {
  out << prefix << "kind = " << to_string(body.kind()) << '\n';
  out << prefix << "dim = " << body.dim() << '\n';
  out << prefix << "declared_R = " << body.declared_R() << '\n';
  switch (body.kind()) {
    case BodyKind::box:
      write_vec(out, prefix, "center", body.as_box()->center);
      write_vec(out, prefix, "halfwidths", body.as_box()->halfwidths);
      break;
    case BodyKind::euclidean_ball:
      write_vec(out, prefix, "center", body.as_ball()->center);
      out << prefix << "radius = " << body.as_ball()->radius << '\n';
      break;
    case BodyKind::simplex:
      write_vec(out, prefix, "corner", body.as_simplex()->corner);
      out << prefix << "scale = " << body.as_simplex()->scale << '\n';
      break;
    case BodyKind::h_polytope: {
      const auto& p = *body.as_polytope();
      out << prefix << "A =";
      for (Eigen::Index i = 0; i < p.A.rows(); ++i) {
        if (i > 0) out << ';';
        for (Eigen::Index j = 0; j < p.A.cols(); ++j) out << ' ' << p.A(i, j);
      }
      out << '\n';
      write_vec(out, prefix, "b", p.b);
      break;
    }
    case BodyKind::intersection: {
      const auto& parts = *body.parts();
      for (std::size_t k = 0; k < parts.size(); ++k) {
        if (parts[k].kind() == BodyKind::intersection) {
          throw std::invalid_argument("serialize_body_spec: nested intersections are not supported");
        }
        serialize_into(out, parts[k], prefix + "part." + std::to_string(k) + ".");
      }
      break;
    }
    case BodyKind::oracle:
      throw std::invalid_argument("serialize_body_spec: oracle bodies have no text form");
  }
}

}  // namespace

ConvexBody parse_body_spec(const std::string& text, const std::filesystem::path& base_dir) {
  const auto fields = split_fields(text);
  if (fields.empty()) throw ParseError(0, "kind", "empty body spec");
  return build_checked(fields, base_dir, 0, fields.front().line);
}

LoadedBody load_body_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_body_spec: cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  LoadedBody out{parse_body_spec(ss.str(), path.parent_path()), {}, {}};
  out.sandwich = sandwich_validate(out.body);
  if (!out.sandwich.inner_ok) out.warnings.push_back("sandwich: B_inf is not contained in the body");
  if (!out.sandwich.outer_ok) {
    out.warnings.push_back("sandwich: body exceeds declared_R * B_inf");
  }
  if (!out.sandwich.outer_exact) {
    out.warnings.push_back("sandwich: outer containment checked by Monte Carlo only");
  }
  return out;
}

std::string serialize_body_spec(const ConvexBody& body) {
  std::ostringstream out;
  out.precision(17);
  serialize_into(out, body, "");
  return out.str();
}

}  // namespace coordhr
