#include "shiftlab/blocks.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "shiftlab/errors.hpp"

namespace shiftlab {

namespace {

std::int64_t parse_int(std::string_view text, std::size_t offset) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ParseError(offset, "expected an integer, got '" + std::string(text) + "'");
  return value;
}

}  // namespace

BlockRule BlockRule::geometric(std::int64_t base) {
  if (base < 2) throw PreconditionError("geometric block rule needs base >= 2");
  BlockRule rule;
  rule.base_ = base;
  rule.starts_.push_back(0);
  std::int64_t n = 1;
  constexpr std::int64_t kCap = std::int64_t{1} << 62;
  while (n <= kCap / base) {
    n *= base;
    rule.starts_.push_back(n);
  }
  return rule;
}

BlockRule BlockRule::list(std::vector<std::int64_t> starts) {
  if (starts.empty() || starts.front() != 0)
    throw PreconditionError("block starts must begin with N_0 = 0");
  if (std::adjacent_find(starts.begin(), starts.end(), std::greater_equal<>()) != starts.end())
    throw PreconditionError("block starts must be strictly increasing");
  BlockRule rule;
  rule.starts_ = std::move(starts);
  return rule;
}

BlockRule BlockRule::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos)
    throw ParseError(0, "block rule must look like geometric:<base> or list:<n0,n1,...>");
  const auto kind = text.substr(0, colon);
  const auto body = text.substr(colon + 1);
  try {
    if (kind == "geometric") return geometric(parse_int(body, colon + 1));
    if (kind == "list") {
      std::vector<std::int64_t> starts;
      std::size_t pos = 0;
      while (pos <= body.size()) {
        auto comma = body.find(',', pos);
        if (comma == std::string_view::npos) comma = body.size();
        starts.push_back(parse_int(body.substr(pos, comma - pos), colon + 1 + pos));
        pos = comma + 1;
      }
      return list(std::move(starts));
    }
  } catch (const PreconditionError& e) {
    throw ParseError(colon + 1, e.what());
  }
  throw ParseError(0, "unknown block rule '" + std::string(kind) + "'");
}

std::size_t BlockRule::index_of(std::int64_t n) const {
  if (n < 0) throw DomainError("block index requested for negative n");
  auto it = std::upper_bound(starts_.begin(), starts_.end(), n);
  return static_cast<std::size_t>(it - starts_.begin()) - 1;
}

std::string BlockRule::to_string() const {
  if (is_geometric()) return "geometric:" + std::to_string(base_);
  std::ostringstream os;
  os << "list:";
  for (std::size_t i = 0; i < starts_.size(); ++i) os << (i ? "," : "") << starts_[i];
  return os.str();
}

}  // namespace shiftlab
