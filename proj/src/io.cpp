#include "celearn/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace celearn {

namespace {

using nlohmann::ordered_json;

std::ifstream open_for_read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return in;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("write failed for " + path);
}

ordered_json parse_json(const std::string& path) {
  auto in = open_for_read(path);
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

int require_count(const ordered_json& root, const char* key,
                  const std::string& path) {
  if (!root.contains(key) || !root[key].is_number_integer())
    throw SchemaViolation(path + ": missing integer field \"" + key + "\"");
  const std::int64_t v = root[key].get<std::int64_t>();
  if (v < 1) throw SchemaViolation(path + ": \"" + std::string(key) +
                                   "\" must be >= 1");
  return static_cast<int>(v);
}

// Shared by market values and bundle prices: {"buyer", "bundle", <field>}.
struct PairRecord {
  int buyer = 0;
  Bundle bundle = 0;
  double value = 0.0;
};

PairRecord read_pair_record(const ordered_json& rec, const char* field, int n,
                            int m, const std::string& path) {
  if (!rec.is_object() || !rec.contains("buyer") || !rec.contains("bundle") ||
      !rec.contains(field))
    throw SchemaViolation(path + ": malformed record " + rec.dump());
  if (!rec["buyer"].is_number_integer() || !rec["bundle"].is_number_integer() ||
      !rec[field].is_number())
    throw SchemaViolation(path + ": malformed record " + rec.dump());
  PairRecord out;
  const std::int64_t buyer = rec["buyer"].get<std::int64_t>();
  const std::int64_t bundle = rec["bundle"].get<std::int64_t>();
  if (buyer < 1 || buyer > n)
    throw SchemaViolation(path + ": buyer out of range in " + rec.dump());
  if (bundle < 0 || bundle > (std::int64_t{1} << m) - 1)
    throw SchemaViolation(path + ": bundle out of range in " + rec.dump());
  out.buyer = static_cast<int>(buyer) - 1;
  out.bundle = static_cast<Bundle>(bundle);
  out.value = rec[field].get<double>();
  if (!std::isfinite(out.value) || out.value < 0.0)
    throw SchemaViolation(path + ": " + std::string(field) +
                          " must be finite and nonnegative in " + rec.dump());
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto first = cell.find_first_not_of(" \t\r");
    const auto last = cell.find_last_not_of(" \t\r");
    out.push_back(first == std::string::npos
                      ? std::string()
                      : cell.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_real(const std::string& cell, const std::string& path) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw ParseError(path + ": not a number: \"" + cell + "\"");
  }
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

Market load_market(const std::string& path) {
  const ordered_json root = parse_json(path);
  if (!root.is_object())
    throw SchemaViolation(path + ": top level must be an object");
  const int n = require_count(root, "buyers", path);
  const int m = require_count(root, "goods", path);
  Market market(n, m);
  if (!root.contains("values")) return market;
  if (!root["values"].is_array())
    throw SchemaViolation(path + ": \"values\" must be an array");
  std::set<std::pair<int, Bundle>> seen;
  for (const auto& rec : root["values"]) {
    const PairRecord r = read_pair_record(rec, "value", n, m, path);
    if (r.bundle == 0 && r.value != 0.0)
      throw SchemaViolation(path + ": empty bundle must have value 0 in " +
                            rec.dump());
    if (!seen.insert({r.buyer, r.bundle}).second)
      throw SchemaViolation(path + ": duplicate record " + rec.dump());
    if (r.bundle != 0) market.set_value(r.buyer, r.bundle, r.value);
  }
  return market;
}

void save_market(const Market& market, const std::string& path) {
  ordered_json root;
  root["buyers"] = market.buyers();
  root["goods"] = market.goods();
  auto& values = root["values"] = ordered_json::array();
  for (int i = 0; i < market.buyers(); ++i)
    for (Bundle s = 1; s <= market.full_bundle(); ++s)
      if (market.value(i, s) != 0.0)
        values.push_back({{"buyer", i + 1},
                          {"bundle", s},
                          {"value", market.value(i, s)}});
  write_text(path, root.dump(2) + "\n");
}

Outcome load_outcome(const std::string& path) {
  const ordered_json root = parse_json(path);
  if (!root.is_object())
    throw SchemaViolation(path + ": top level must be an object");
  const int n = require_count(root, "buyers", path);
  const int m = require_count(root, "goods", path);
  if (m > Market::kMaxGoods)
    throw TooManyGoods(path + ": goods exceed the dense cap");

  if (!root.contains("allocation") || !root["allocation"].is_array() ||
      static_cast<int>(root["allocation"].size()) != n)
    throw SchemaViolation(path +
                          ": \"allocation\" must list one bundle per buyer");
  Allocation alloc;
  for (const auto& entry : root["allocation"]) {
    if (!entry.is_number_integer())
      throw SchemaViolation(path + ": allocation entries must be bitmasks");
    const std::int64_t s = entry.get<std::int64_t>();
    if (s < 0 || s > (std::int64_t{1} << m) - 1)
      throw SchemaViolation(path + ": allocation bundle out of range");
    alloc.push_back(static_cast<Bundle>(s));
  }

  if (!root.contains("prices") || !root["prices"].is_object())
    throw SchemaViolation(path + ": missing \"prices\" object");
  const auto& prices = root["prices"];
  if (prices.contains("linear") == prices.contains("bundle"))
    throw SchemaViolation(
        path + ": \"prices\" needs exactly one of \"linear\" or \"bundle\"");

  if (prices.contains("linear")) {
    const auto& arr = prices["linear"];
    if (!arr.is_array() || static_cast<int>(arr.size()) != m)
      throw SchemaViolation(path + ": \"linear\" must list one price per good");
    std::vector<double> p;
    for (const auto& entry : arr) {
      if (!entry.is_number())
        throw SchemaViolation(path + ": prices must be numbers");
      const double v = entry.get<double>();
      if (!std::isfinite(v) || v < 0.0)
        throw SchemaViolation(path + ": prices must be finite and nonnegative");
      p.push_back(v);
    }
    return Outcome{std::move(alloc), Pricing::linear(std::move(p))};
  }

  if (!prices["bundle"].is_array())
    throw SchemaViolation(path + ": \"bundle\" prices must be an array");
  Pricing table = Pricing::per_buyer_bundle(n, m);
  std::set<std::pair<int, Bundle>> seen;
  for (const auto& rec : prices["bundle"]) {
    const PairRecord r = read_pair_record(rec, "price", n, m, path);
    if (!seen.insert({r.buyer, r.bundle}).second)
      throw SchemaViolation(path + ": duplicate price record " + rec.dump());
    table.set_price(r.buyer, r.bundle, r.value);
  }
  return Outcome{std::move(alloc), std::move(table)};
}

void save_outcome(const Outcome& outcome, int num_goods,
                  const std::string& path) {
  const int n = static_cast<int>(outcome.allocation.size());
  const int m = outcome.pricing.goods();
  if (num_goods != m)
    throw DimensionMismatch("good count does not match the pricing");
  ordered_json root;
  root["buyers"] = n;
  root["goods"] = m;
  auto& alloc = root["allocation"] = ordered_json::array();
  for (Bundle s : outcome.allocation) alloc.push_back(s);
  if (outcome.pricing.kind() == Pricing::Kind::Linear) {
    root["prices"]["linear"] = outcome.pricing.linear_prices();
  } else {
    auto& rows = root["prices"]["bundle"] = ordered_json::array();
    for (int i = 0; i < n; ++i)
      for (Bundle s = 1; s <= (Bundle{1} << m) - 1; ++s)
        if (outcome.pricing.price(i, s) != 0.0)
          rows.push_back({{"buyer", i + 1},
                          {"bundle", s},
                          {"price", outcome.pricing.price(i, s)}});
  }
  write_text(path, root.dump(2) + "\n");
}

UnitDemandMatrix load_unit_demand_csv(const std::string& path) {
  auto in = open_for_read(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    std::vector<double> row;
    for (const auto& cell : cells) {
      const double v = parse_real(cell, path);
      if (!std::isfinite(v) || v < 0.0)
        throw SchemaViolation(path + ": entries must be finite and nonnegative");
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw SchemaViolation(path + ": ragged rows");
    rows.push_back(std::move(row));
  }
  if (rows.empty() || rows.front().empty())
    throw SchemaViolation(path + ": need at least one row and one column");
  if (rows.front().size() > 31)
    throw TooManyGoods(path + ": singleton bitmasks need m <= 31");
  UnitDemandMatrix matrix(static_cast<int>(rows.size()),
                          static_cast<int>(rows.front().size()));
  for (int i = 0; i < matrix.n; ++i)
    for (int j = 0; j < matrix.m; ++j) matrix.set(i, j, rows[i][j]);
  return matrix;
}

void save_unit_demand_csv(const UnitDemandMatrix& matrix,
                          const std::string& path) {
  std::string text;
  for (int i = 0; i < matrix.n; ++i) {
    for (int j = 0; j < matrix.m; ++j) {
      if (j > 0) text += ',';
      text += format_double(matrix.at(i, j));
    }
    text += '\n';
  }
  write_text(path, text);
}

std::string estimates_csv(const EstimateTable& table) {
  std::string text = "buyer,bundle,mean,radius,status,samples\n";
  for (const auto& [key, est] : table.entries) {
    text += std::to_string(key.buyer + 1);
    text += ',';
    text += std::to_string(key.bundle);
    text += ',';
    text += format_double(est.mean);
    text += ',';
    text += format_double(est.radius);
    text += est.pruned ? ",Pruned," : ",Active,";
    text += std::to_string(est.samples);
    text += '\n';
  }
  return text;
}

void save_estimates_csv(const EstimateTable& table, const std::string& path) {
  write_text(path, estimates_csv(table));
}

EstimateTable load_estimates_csv(const std::string& path) {
  auto in = open_for_read(path);
  std::string line;
  if (!std::getline(in, line) ||
      split_csv_line(line) !=
          std::vector<std::string>{"buyer", "bundle", "mean", "radius",
                                   "status", "samples"})
    throw SchemaViolation(path + ": bad estimates header");
  EstimateTable table;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 6)
      throw SchemaViolation(path + ": estimates rows need 6 cells");
    Estimate est;
    const int buyer = static_cast<int>(parse_real(cells[0], path)) - 1;
    const Bundle bundle = static_cast<Bundle>(parse_real(cells[1], path));
    est.mean = parse_real(cells[2], path);
    est.radius = parse_real(cells[3], path);
    if (cells[4] == "Active")
      est.pruned = false;
    else if (cells[4] == "Pruned")
      est.pruned = true;
    else
      throw SchemaViolation(path + ": unknown status \"" + cells[4] + "\"");
    est.samples = static_cast<std::int64_t>(parse_real(cells[5], path));
    if (buyer < 0 || !table.entries.emplace(PairKey{buyer, bundle}, est).second)
      throw SchemaViolation(path + ": bad or duplicate estimate row");
  }
  return table;
}

std::string learn_result_json(const LearnResult& result) {
  ordered_json root;
  root["eps_hat"] = result.eps_hat;
  root["delta_spent"] = result.delta_spent;
  root["delta_budget"] = result.delta_budget;
  root["iterations"] = result.iterations;
  root["total_samples"] = result.total_samples;
  root["active_pairs"] = result.estimates.active_pairs().size();
  root["pruned_pairs"] =
      result.estimates.entries.size() - result.estimates.active_pairs().size();
  return root.dump(2) + "\n";
}

void save_learn_result(const LearnResult& result, const std::string& path) {
  write_text(path, learn_result_json(result));
}

}  // namespace celearn
