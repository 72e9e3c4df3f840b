#include "spec_parser.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "shiftlab/errors.hpp"

namespace shiftlab::cli {

namespace {

std::string_view trim(std::string_view s, std::size_t& offset) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
    ++offset;
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_real(std::string_view s, std::size_t offset) {
  s = trim(s, offset);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size())
    throw ParseError(offset, "expected a real number, got '" + std::string(s) + "'");
  return v;
}

std::int64_t parse_integer(std::string_view s, std::size_t offset) {
  s = trim(s, offset);
  std::int64_t v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size())
    throw ParseError(offset, "expected an integer, got '" + std::string(s) + "'");
  return v;
}

struct Field {
  std::string_view key;
  std::string_view value;
  std::size_t value_offset;
};

// Splits "a=x;b=(y;z)" on top-level ';' into key/value fields.
std::vector<Field> split_fields(std::string_view body, std::size_t offset, bool first_may_be_bare) {
  std::vector<Field> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= body.size(); ++i) {
    const char c = i < body.size() ? body[i] : ';';
    if (c == '(') ++depth;
    if (c == ')' && --depth < 0) throw ParseError(offset + i, "unbalanced ')'");
    if (c != ';' || depth != 0) continue;
    const auto part = body.substr(start, i - start);
    const auto eq = part.find('=');
    if (first_may_be_bare && start == 0) {
      out.push_back({"", part, offset});
    } else if (eq == std::string_view::npos) {
      throw ParseError(offset + start, "expected key=value");
    } else {
      out.push_back({part.substr(0, eq), part.substr(eq + 1), offset + start + eq + 1});
    }
    start = i + 1;
  }
  if (depth != 0) throw ParseError(offset + body.size(), "missing ')'");
  return out;
}

std::string_view unwrap(std::string_view v, std::size_t& offset) {
  v = trim(v, offset);
  if (v.size() >= 2 && v.front() == '(' && v.back() == ')') {
    ++offset;
    return v.substr(1, v.size() - 2);
  }
  return v;
}

using FieldMap = std::map<std::string, Field, std::less<>>;

FieldMap keyed(const std::vector<Field>& fields, std::initializer_list<std::string_view> allowed) {
  FieldMap out;
  for (const auto& f : fields) {
    bool ok = false;
    for (auto a : allowed) ok = ok || f.key == a;
    if (!ok) throw ParseError(f.value_offset - f.key.size() - 1, "unknown key '" + std::string(f.key) + "'");
    if (!out.emplace(std::string(f.key), f).second)
      throw ParseError(f.value_offset, "duplicate key '" + std::string(f.key) + "'");
  }
  return out;
}

const Field& require(const FieldMap& m, std::string_view key, std::size_t offset) {
  const auto it = m.find(key);
  if (it == m.end()) throw ParseError(offset, "missing key '" + std::string(key) + "'");
  return it->second;
}

std::map<std::int64_t, double> read_table(const std::filesystem::path& path, std::size_t offset) {
  std::ifstream in(path);
  if (!in) throw ParseError(offset, "cannot open weight table '" + path.string() + "'");
  std::map<std::int64_t, double> table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw ParseError(offset, path.string() + ":" + std::to_string(line_no) + ": expected index,value");
    std::string_view sv(line);
    if (line_no == 1 && line.find_first_of("0123456789") > comma) continue;  // header row
    try {
      table[parse_integer(sv.substr(0, comma), 0)] = parse_real(sv.substr(comma + 1), 0);
    } catch (const ParseError& e) {
      throw ParseError(offset, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return table;
}

WeightModel parse_at(std::string_view text, std::size_t offset, const std::filesystem::path& base_dir) {
  text = unwrap(text, offset);
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw ParseError(offset, "expected <family>:<parameters>");
  const auto family = text.substr(0, colon);
  const auto body = text.substr(colon + 1);
  const auto body_offset = offset + colon + 1;

  if (family == "constant") return WeightModel::constant(parse_real(body, body_offset));

  if (family == "periodic") {
    std::int64_t anchor = 0;
    auto values_text = body;
    if (const auto at = body.find('@'); at != std::string_view::npos) {
      anchor = parse_integer(body.substr(at + 1), body_offset + at + 1);
      values_text = body.substr(0, at);
    }
    std::vector<double> values;
    std::size_t pos = 0;
    while (true) {
      const auto comma = values_text.find(',', pos);
      values.push_back(parse_real(values_text.substr(pos, comma - pos), body_offset + pos));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    return WeightModel::periodic(std::move(values), anchor);
  }

  if (family == "split") {
    const auto fields = keyed(split_fields(body, body_offset, false), {"neg", "pos", "cut"});
    const auto& neg = require(fields, "neg", body_offset);
    const auto& pos = require(fields, "pos", body_offset);
    const auto& cut = require(fields, "cut", body_offset);
    return WeightModel::split(parse_at(neg.value, neg.value_offset, base_dir),
                              parse_at(pos.value, pos.value_offset, base_dir),
                              parse_integer(cut.value, cut.value_offset));
  }

  if (family == "explicit") {
    auto fields = split_fields(body, body_offset, true);
    const auto file = fields.front();
    fields.erase(fields.begin());
    const auto rest = keyed(fields, {"negfill", "posfill"});
    const auto& nf = require(rest, "negfill", body_offset);
    const auto& pf = require(rest, "posfill", body_offset);
    std::size_t file_offset = file.value_offset;
    const auto name = trim(file.value, file_offset);
    if (name.empty()) throw ParseError(file_offset, "missing table file");
    std::filesystem::path path{std::string(name)};
    if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
    return WeightModel::explicit_table(read_table(path, file_offset), parse_real(nf.value, nf.value_offset),
                                       parse_real(pf.value, pf.value_offset));
  }

  if (family == "fhc") {
    const auto fields = keyed(split_fields(body, body_offset, false), {"blocks", "horizon"});
    const auto& blocks = require(fields, "blocks", body_offset);
    std::int64_t horizon = kDefaultFhcHorizon;
    if (const auto it = fields.find("horizon"); it != fields.end())
      horizon = parse_integer(it->second.value, it->second.value_offset);
    std::size_t block_offset = blocks.value_offset;
    const auto rule_text = unwrap(blocks.value, block_offset);
    BlockRule rule = BlockRule::geometric(2);
    try {
      rule = BlockRule::parse(rule_text);
    } catch (const ParseError& e) {
      throw ParseError(block_offset + e.position(), e.what());
    }
    return WeightModel::fhc_block(std::make_shared<const PowerSeriesSpace>(std::move(rule), horizon));
  }

  throw ParseError(offset, "unknown weight family '" + std::string(family) + "'");
}

}  // namespace

WeightModel parse_weights(std::string_view text, const std::filesystem::path& base_dir) {
  return parse_at(text, 0, base_dir);
}

BlockRule parse_blocks(std::string_view text) { return BlockRule::parse(text); }

}  // namespace shiftlab::cli
