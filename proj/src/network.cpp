#include "netident/network.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

#include "netident/errors.hpp"

namespace netident {
namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

std::vector<std::string> split_char(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

class LineError {
 public:
  LineError(const std::string& source, int line) : prefix_(source + ":" + std::to_string(line) + ": ") {}
  [[noreturn]] void fail(const std::string& what) const { throw Error(ErrorCode::Parse, prefix_ + what); }

  int to_int(const std::string& s) const {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) fail("expected integer, got '" + s + "'");
    return v;
  }
  double to_double(const std::string& s) const {
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) fail("expected number, got '" + s + "'");
    return v;
  }

 private:
  std::string prefix_;
};

}  // namespace

bool NetworkSpec::has_truth() const {
  return std::all_of(edges.begin(), edges.end(), [](const Edge& e) { return e.coefficients.has_value(); });
}

EdgeFunction NetworkSpec::true_function(std::size_t edge) const {
  const Edge& e = edges.at(edge);
  if (!e.coefficients)
    throw Error(ErrorCode::MissingCoefficients, "edge " + edge_label(e) + " has no true coefficients");
  return EdgeFunction(e.basis, *e.coefficients);
}

std::size_t NetworkSpec::coefficient_count() const {
  std::size_t n = 0;
  for (const auto& e : edges) n += e.basis.size();
  return n;
}

std::string node_label(int node) { return std::to_string(node + 1); }

std::string edge_label(const Edge& e) { return node_label(e.tail) + "->" + node_label(e.head); }

NetworkSpec parse_network(std::istream& in, const std::string& source) {
  NetworkSpec spec;
  bool have_nodes = false;
  bool have_measured = false;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const LineError err(source, line_no);
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const auto tokens = split_ws(raw);
    if (tokens.empty()) continue;
    const std::string& key = tokens[0];

    if (key == "nodes") {
      if (tokens.size() != 2) err.fail("usage: nodes N");
      if (have_nodes) err.fail("duplicate 'nodes' directive");
      spec.node_count = err.to_int(tokens[1]);
      if (spec.node_count < 1) err.fail("node count must be positive");
      have_nodes = true;
    } else if (key == "class") {
      if (tokens.size() != 2) err.fail("usage: class F_Z|F_ZNL");
      if (tokens[1] == "F_Z") {
        spec.function_class = FunctionClass::FZ;
      } else if (tokens[1] == "F_ZNL") {
        spec.function_class = FunctionClass::FZNL;
      } else {
        err.fail("unknown function class '" + tokens[1] + "'");
      }
    } else if (key == "edge") {
      if (!have_nodes) err.fail("'nodes' must precede the first edge");
      if (tokens.size() < 4) err.fail("usage: edge TAIL HEAD basis=<list> [coeff=<list>]");
      Edge e;
      e.tail = err.to_int(tokens[1]) - 1;
      e.head = err.to_int(tokens[2]) - 1;
      if (e.tail < 0 || e.tail >= spec.node_count || e.head < 0 || e.head >= spec.node_count)
        err.fail("edge endpoint out of range 1.." + std::to_string(spec.node_count));
      bool have_basis = false;
      for (std::size_t i = 3; i < tokens.size(); ++i) {
        const auto eq = tokens[i].find('=');
        if (eq == std::string::npos) err.fail("expected key=value, got '" + tokens[i] + "'");
        const std::string k = tokens[i].substr(0, eq);
        const std::string v = tokens[i].substr(eq + 1);
        if (k == "basis") {
          try {
            e.basis = parse_basis_list(v);
          } catch (const Error& ex) {
            err.fail(ex.what());
          }
          have_basis = true;
        } else if (k == "coeff") {
          std::vector<double> c;
          for (const auto& item : split_char(v, ',')) c.push_back(err.to_double(item));
          e.coefficients = std::move(c);
        } else {
          err.fail("unknown edge key '" + k + "'");
        }
      }
      if (!have_basis) err.fail("edge is missing basis=<list>");
      if (e.coefficients && e.coefficients->size() != e.basis.size())
        err.fail("coeff has " + std::to_string(e.coefficients->size()) + " entries but basis has " +
                 std::to_string(e.basis.size()));
      spec.edges.push_back(std::move(e));
    } else if (key == "measured") {
      if (!have_nodes) err.fail("'nodes' must precede 'measured'");
      std::string joined;
      for (std::size_t i = 1; i < tokens.size(); ++i) joined += tokens[i];
      std::set<int> nodes;
      if (!joined.empty()) {
        for (const auto& item : split_char(joined, ',')) {
          const int n = err.to_int(item) - 1;
          if (n < 0 || n >= spec.node_count) err.fail("measured node out of range: " + item);
          nodes.insert(n);
        }
      }
      spec.measured.assign(nodes.begin(), nodes.end());
      have_measured = true;
    } else if (key == "plan") {
      for (std::size_t i = 1; i < tokens.size(); ++i) {
        const auto eq = tokens[i].find('=');
        if (eq == std::string::npos) err.fail("expected key=value, got '" + tokens[i] + "'");
        const std::string k = tokens[i].substr(0, eq);
        const std::string v = tokens[i].substr(eq + 1);
        if (k == "K") {
          spec.plan.experiments = err.to_int(v);
        } else if (k == "h") {
          spec.plan.period = err.to_double(v);
        } else if (k == "samples") {
          spec.plan.samples = err.to_int(v);
        } else if (k == "sigma") {
          spec.plan.sigma = err.to_double(v);
        } else if (k == "window") {
          spec.plan.window = err.to_int(v);
        } else if (k == "degree") {
          spec.plan.degree = err.to_int(v);
        } else if (k == "ic") {
          const auto parts = split_char(v, ',');
          if (parts.size() != 2) err.fail("ic expects lo,hi");
          spec.plan.ic_low = err.to_double(parts[0]);
          spec.plan.ic_high = err.to_double(parts[1]);
        } else {
          err.fail("unknown plan key '" + k + "'");
        }
      }
    } else {
      err.fail("unknown directive '" + key + "'");
    }
  }
  if (!have_nodes) throw Error(ErrorCode::Parse, source + ": missing 'nodes' directive");
  if (!have_measured) throw Error(ErrorCode::Parse, source + ": missing 'measured' directive");
  return spec;
}

NetworkSpec parse_network_text(const std::string& text) {
  std::istringstream in(text);
  return parse_network(in, "<string>");
}

NetworkSpec load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open network file '" + path + "'");
  return parse_network(in, path);
}

std::string format_network(const NetworkSpec& spec) {
  std::ostringstream out;
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "nodes " << spec.node_count << "\n";
  out << "class " << (spec.function_class == FunctionClass::FZ ? "F_Z" : "F_ZNL") << "\n";
  for (const auto& e : spec.edges) {
    out << "edge " << node_label(e.tail) << ' ' << node_label(e.head) << " basis=" << format_basis_list(e.basis);
    if (e.coefficients) {
      out << " coeff=";
      for (std::size_t i = 0; i < e.coefficients->size(); ++i) out << (i ? "," : "") << (*e.coefficients)[i];
    }
    out << "\n";
  }
  out << "measured ";
  for (std::size_t i = 0; i < spec.measured.size(); ++i) out << (i ? "," : "") << node_label(spec.measured[i]);
  out << "\n";

  const auto& p = spec.plan;
  std::ostringstream plan;
  if (p.experiments) plan << " K=" << *p.experiments;
  if (p.period) plan << " h=" << *p.period;
  if (p.samples) plan << " samples=" << *p.samples;
  if (p.sigma) plan << " sigma=" << *p.sigma;
  if (p.window) plan << " window=" << *p.window;
  if (p.degree) plan << " degree=" << *p.degree;
  if (p.ic_low && p.ic_high) plan << " ic=" << *p.ic_low << ',' << *p.ic_high;
  if (!plan.str().empty()) out << "plan" << plan.str() << "\n";
  return out.str();
}

}  // namespace netident
