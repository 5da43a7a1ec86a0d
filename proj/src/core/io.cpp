#include "mimm/core/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "mimm/error.hpp"

namespace mimm {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = line.find(sep, pos);
    out.push_back(trim(line.substr(pos, next == std::string_view::npos ? line.npos : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

bool parse_double(std::string_view s, double& value) {
  if (s.empty()) return false;
  // from_chars rejects a leading '+'; accept it for hand-written files.
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec == std::errc::result_out_of_range) return false;
  return ec == std::errc() && ptr == s.data() + s.size();
}

// from_chars maps "nan"/"inf" to values; the caller decides whether they are legal.
bool looks_numeric(std::string_view s) {
  double v = 0.0;
  return parse_double(s, v);
}

}  // namespace

KeyValues parse_key_values(std::string_view text) {
  KeyValues kv;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    require(eq != std::string_view::npos, ErrorKind::validation,
            "line " + std::to_string(line_no) + " is not key=value: '" + std::string(line) + "'");
    kv[std::string(trim(line.substr(0, eq)))] = std::string(trim(line.substr(eq + 1)));
  }
  return kv;
}

std::string format_key_values(const KeyValues& kv) {
  std::string out;
  for (const auto& [k, v] : kv) out += k + '=' + v + '\n';
  return out;
}

KeyValues read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::io, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_key_values(buf.str());
}

void write_key_values(const KeyValues& kv, const std::filesystem::path& path) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::io, "cannot write " + path.string());
  out << format_key_values(kv);
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
  return std::filesystem::path(csv.string() + ".meta");
}

std::vector<ColumnKind> parse_kinds(std::string_view text) {
  std::vector<ColumnKind> kinds;
  for (auto token : split(text, ',')) {
    if (token == "real") {
      kinds.push_back(ColumnKind::real);
    } else if (token == "binary") {
      kinds.push_back(ColumnKind::binary);
    } else {
      fail(ErrorKind::validation, "unknown column kind '" + std::string(token) + "'");
    }
  }
  return kinds;
}

std::string format_kinds(const std::vector<ColumnKind>& kinds) {
  std::string out;
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    if (i) out += ',';
    out += kinds[i] == ColumnKind::binary ? "binary" : "real";
  }
  return out;
}

TimeSeries read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::io, "cannot open data file " + path.string());
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (rows == 0 && cols == 0 && !looks_numeric(fields.front())) {
      cols = fields.size();  // header row
      continue;
    }
    if (cols == 0) cols = fields.size();
    require(fields.size() == cols, ErrorKind::shape,
            path.string() + ":" + std::to_string(line_no) + ": expected " + std::to_string(cols) +
                " fields, found " + std::to_string(fields.size()));
    for (auto f : fields) {
      double v = 0.0;
      if (!parse_double(f, v)) {
        fail(ErrorKind::validation, path.string() + ":" + std::to_string(line_no) +
                                        ": cannot parse '" + std::string(f) + "' as a number");
      }
      values.push_back(v);
    }
    ++rows;
  }
  require(rows >= 1, ErrorKind::insufficient_data, path.string() + " holds no data rows");

  RowMatrix data(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  std::copy(values.begin(), values.end(), data.data());

  std::vector<ColumnKind> kinds(cols, ColumnKind::real);
  const auto meta = sidecar_path(path);
  if (std::filesystem::exists(meta)) {
    const auto kv = read_key_values(meta);
    if (const auto it = kv.find("kinds"); it != kv.end()) {
      kinds = parse_kinds(it->second);
      require(kinds.size() == cols, ErrorKind::shape,
              meta.string() + " declares " + std::to_string(kinds.size()) + " column kinds for " +
                  std::to_string(cols) + " columns");
    }
  }
  try {
    return TimeSeries(std::move(data), std::move(kinds));
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void write_csv(const TimeSeries& series, const std::filesystem::path& path) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::io, "cannot write data file " + path.string());
  char buf[64];
  for (std::size_t t = 0; t < series.length(); ++t) {
    for (std::size_t c = 0; c < series.dim(); ++c) {
      if (c) out << ',';
      std::snprintf(buf, sizeof buf, "%.17g", series(t, c));
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace mimm
