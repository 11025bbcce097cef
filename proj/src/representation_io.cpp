#include "anosov/representation.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace anosov {

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_matrix(std::ostream& os, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? " " : "") << fmt17(m(i, j));
    os << '\n';
  }
}

// Next non-empty line that is not a '#' comment.
bool next_line(std::istream& is, std::string& line, int& lineno) {
  while (std::getline(is, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    return true;
  }
  return false;
}

Eigen::MatrixXd read_matrix(std::istream& is, int d, int& lineno) {
  Eigen::MatrixXd m(d, d);
  std::string line;
  for (int i = 0; i < d; ++i) {
    if (!next_line(is, line, lineno)) throw ConfigError("unexpected end of representation file");
    std::istringstream ls(line);
    for (int j = 0; j < d; ++j)
      if (!(ls >> m(i, j)))
        throw ConfigError("line " + std::to_string(lineno) + ": expected " + std::to_string(d) +
                          " numbers");
  }
  return m;
}

}  // namespace

void write_representation(std::ostream& os, const Representation& rep) {
  const GroupSpec& s = rep.spec();
  os << "group " << (s.kind == GroupKind::Free ? "free " : "surface ") << s.rank << '\n';
  os << "dim " << rep.dim() << '\n';
  for (int i = 0; i < s.generators(); ++i) {
    os << "gen " << i << '\n';
    write_matrix(os, rep.image(static_cast<Letter>(2 * i)));
  }
  if (rep.form()) {
    os << "form\n";
    write_matrix(os, *rep.form());
  }
}

Representation read_representation(std::istream& is, const std::string& name) {
  std::string line, key;
  int lineno = 0;
  std::optional<GroupSpec> spec;
  int d = 0;
  std::vector<Eigen::MatrixXd> gens;
  std::optional<Eigen::MatrixXd> form;
  while (next_line(is, line, lineno)) {
    std::istringstream ls(line);
    ls >> key;
    if (key == "group") {
      std::string kind;
      int rank = 0;
      if (!(ls >> kind >> rank)) throw ConfigError("line " + std::to_string(lineno) + ": bad group");
      if (kind == "free")
        spec = GroupSpec::free(rank);
      else if (kind == "surface")
        spec = GroupSpec::surface(rank);
      else
        throw ConfigError("unknown group kind '" + kind + "'");
    } else if (key == "dim") {
      if (!(ls >> d) || d < 1) throw ConfigError("line " + std::to_string(lineno) + ": bad dim");
    } else if (key == "gen") {
      int idx = -1;
      ls >> idx;
      if (!spec || d == 0) throw ConfigError("gen before group/dim header");
      if (idx != static_cast<int>(gens.size()))
        throw ConfigError("line " + std::to_string(lineno) + ": generators must appear in order");
      gens.push_back(read_matrix(is, d, lineno));
    } else if (key == "form") {
      if (d == 0) throw ConfigError("form before dim header");
      form = read_matrix(is, d, lineno);
    } else {
      throw ConfigError("line " + std::to_string(lineno) + ": unknown keyword '" + key + "'");
    }
  }
  if (!spec) throw ConfigError("representation file lacks a group line");
  return Representation::from_generators(*spec, gens, name, form);
}

void save_representation(const std::string& path, const Representation& rep) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path);
  write_representation(os, rep);
}

Representation load_representation(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read " + path);
  return read_representation(is, "import");
}

}  // namespace anosov
