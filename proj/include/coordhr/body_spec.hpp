#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "coordhr/geometry.hpp"

namespace coordhr {

/// Body spec files are `key = value` lines; `#` starts a comment.
///
///   kind = box | h_polytope | euclidean_ball | simplex | intersection
///   dim = 3
///   declared_R = 1
///   center = 0 0 0          (box, euclidean_ball)
///   halfwidths = 1 1 1      (box)
///   radius = 1.5            (euclidean_ball)
///   A = 1 0; -1 0; 0 1      (h_polytope; rows separated by ';')
///   b = 1 1 1
///   corner = -1 -1          (simplex: x >= corner, sum(x - corner) <= scale)
///   scale = 4
///   part = other.body       (intersection; repeatable, relative to this file)
///
/// Numbers may be separated by spaces or commas.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, std::string field, const std::string& message);
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

struct LoadedBody {
  ConvexBody body;
  SandwichReport sandwich;
  std::vector<std::string> warnings;
};

ConvexBody parse_body_spec(const std::string& text,
                           const std::filesystem::path& base_dir = ".");
LoadedBody load_body_spec(const std::filesystem::path& path);

/// Canonical text form. Intersections are written inline as `part.<k>.<key>`
/// lines so one file is self-contained. Oracle bodies cannot be serialized.
std::string serialize_body_spec(const ConvexBody& body);

}  // namespace coordhr
