#include "mimm/core/dependence.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "mimm/error.hpp"

namespace mimm {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

int parse_int(std::string_view s, std::string_view context) {
  s = trim(s);
  int value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    fail(ErrorKind::validation, "cannot parse integer '" + std::string(s) + "' in " +
                                    std::string(context));
  }
  return value;
}

}  // namespace

MonomialTerm::MonomialTerm(std::vector<Factor> factors) {
  require(!factors.empty(), ErrorKind::validation, "a monomial term needs at least one factor");
  for (const auto& f : factors) {
    require(f.lag >= 0 && f.component >= 0, ErrorKind::validation,
            "factor lag and component must be non-negative");
    require(f.exponent >= 1, ErrorKind::validation, "factor exponent must be >= 1");
  }
  std::sort(factors.begin(), factors.end());
  for (const auto& f : factors) {
    if (!factors_.empty() && factors_.back().lag == f.lag &&
        factors_.back().component == f.component) {
      factors_.back().exponent += f.exponent;
    } else {
      factors_.push_back(f);
    }
  }
}

int MonomialTerm::max_lag() const noexcept {
  int m = 0;
  for (const auto& f : factors_) m = std::max(m, f.lag);
  return m;
}

int MonomialTerm::max_component() const noexcept {
  int m = 0;
  for (const auto& f : factors_) m = std::max(m, f.component);
  return m;
}

bool MonomialTerm::has_lag(int lag) const noexcept {
  return std::any_of(factors_.begin(), factors_.end(),
                     [lag](const Factor& f) { return f.lag == lag; });
}

std::string MonomialTerm::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (i) out += '*';
    out += std::to_string(factors_[i].lag) + ':' + std::to_string(factors_[i].component) + '^' +
           std::to_string(factors_[i].exponent);
  }
  return out;
}

MonomialTerm MonomialTerm::parse(std::string_view text) {
  std::vector<Factor> factors;
  std::string_view rest = trim(text);
  require(!rest.empty(), ErrorKind::validation, "empty monomial term");
  while (!rest.empty()) {
    const auto star = rest.find('*');
    const std::string_view token = trim(rest.substr(0, star));
    rest = star == std::string_view::npos ? std::string_view{} : rest.substr(star + 1);

    const auto colon = token.find(':');
    require(colon != std::string_view::npos, ErrorKind::validation,
            "factor '" + std::string(token) + "' is not of the form lag:component^exponent");
    const auto caret = token.find('^', colon);
    Factor f;
    f.lag = parse_int(token.substr(0, colon), token);
    if (caret == std::string_view::npos) {
      f.component = parse_int(token.substr(colon + 1), token);
      f.exponent = 1;
    } else {
      f.component = parse_int(token.substr(colon + 1, caret - colon - 1), token);
      f.exponent = parse_int(token.substr(caret + 1), token);
    }
    factors.push_back(f);
  }
  return MonomialTerm(std::move(factors));
}

DependenceSpec::DependenceSpec(int order, int dim, std::vector<MonomialTerm> terms)
    : order_(order), dim_(dim), terms_(std::move(terms)) {
  require(order_ >= 1, ErrorKind::validation, "dependence order d must be >= 1");
  require(dim_ >= 1, ErrorKind::validation, "dimension p must be >= 1");
  require(!terms_.empty(), ErrorKind::validation, "a dependence spec needs K >= 1 terms");
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    const auto& term = terms_[k];
    require(term.max_lag() <= order_, ErrorKind::validation,
            "term " + std::to_string(k + 1) + " (" + term.to_string() + ") uses a lag beyond order " +
                std::to_string(order_));
    require(term.max_component() < dim_, ErrorKind::validation,
            "term " + std::to_string(k + 1) + " (" + term.to_string() +
                ") uses a component beyond dim " + std::to_string(dim_));
    require(term.has_lag(0), ErrorKind::validation,
            "term " + std::to_string(k + 1) + " (" + term.to_string() +
                ") has no lag-0 factor; it would only shift the conditional model by a constant");
  }
}

DependenceSpec DependenceSpec::with_order(int order) const {
  require(order >= order_, ErrorKind::validation, "with_order can only raise the order");
  return DependenceSpec(order, dim_, terms_);
}

std::size_t DependenceSpec::hash() const noexcept {
  std::size_t h = std::hash<int>{}(order_) * 31 + std::hash<int>{}(dim_);
  for (const auto& term : terms_) {
    for (const auto& f : term.factors()) {
      h = h * 1000003u ^ static_cast<std::size_t>(f.lag * 7919 + f.component * 104729 + f.exponent);
    }
    h = h * 31 + 17;
  }
  return h;
}

DependenceSpec parse_spec(std::string_view text) {
  int order = -1;
  int dim = -1;
  std::vector<MonomialTerm> terms;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.starts_with("order=")) {
      order = parse_int(line.substr(6), "order directive");
    } else if (line.starts_with("dim=")) {
      dim = parse_int(line.substr(4), "dim directive");
    } else {
      try {
        terms.push_back(MonomialTerm::parse(line));
      } catch (const Error& e) {
        fail(ErrorKind::validation, "line " + std::to_string(line_no) + ": " + e.what());
      }
    }
  }
  require(!terms.empty(), ErrorKind::validation, "dependence spec has no terms");
  int max_lag = 0;
  int max_comp = 0;
  for (const auto& t : terms) {
    max_lag = std::max(max_lag, t.max_lag());
    max_comp = std::max(max_comp, t.max_component());
  }
  if (order < 0) order = std::max(1, max_lag);
  if (dim < 0) dim = max_comp + 1;
  return DependenceSpec(order, dim, std::move(terms));
}

std::string format_spec(const DependenceSpec& spec) {
  std::ostringstream os;
  os << "order=" << spec.order() << '\n' << "dim=" << spec.dim() << '\n';
  for (const auto& t : spec.terms()) os << t.to_string() << '\n';
  return os.str();
}

DependenceSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::io, "cannot open spec file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_spec(buf.str());
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void save_spec(const DependenceSpec& spec, const std::filesystem::path& path) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::io, "cannot write spec file " + path.string());
  out << format_spec(spec);
}

DependenceSpec kron_spec(int dim, std::span<const KronLag> lags) {
  require(dim >= 1, ErrorKind::validation, "kron_spec needs p >= 1");
  require(!lags.empty(), ErrorKind::validation, "kron_spec needs at least one lag entry");
  int order = 1;
  std::vector<MonomialTerm> terms;
  for (const auto& l : lags) {
    require(l.lag >= 1 && l.exp_t >= 1 && l.exp_lag >= 1, ErrorKind::validation,
            "kron_spec entries need lag >= 1 and exponents >= 1");
    order = std::max(order, l.lag);
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) {
        terms.emplace_back(std::vector<Factor>{{0, i, l.exp_t}, {l.lag, j, l.exp_lag}});
      }
    }
  }
  return DependenceSpec(order, dim, std::move(terms));
}

DependenceSpec ar_spec(int order) {
  require(order >= 1, ErrorKind::validation, "ar_spec needs order >= 1");
  std::vector<KronLag> lags;
  for (int i = 1; i <= order; ++i) lags.push_back({i, 1, 1});
  return kron_spec(1, lags);
}

}  // namespace mimm
