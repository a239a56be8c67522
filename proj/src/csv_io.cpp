#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "perscale/config.hpp"
#include "perscale/error.hpp"
#include "perscale/io.hpp"

namespace perscale {

using nlohmann::json;

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError(fmt::format("{}: '{}' is not a number", where, s));
  }
}

std::ofstream open_out(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  return out;
}

std::vector<std::vector<std::string>> read_rows(const std::string& path, const std::string& producer,
                                                const std::string& expected_header_prefix) {
  std::stringstream ss(read_file(path, producer));
  std::string line;
  if (!std::getline(ss, line) || line.rfind(expected_header_prefix, 0) != 0)
    throw ValidationError(fmt::format("{}: expected a header starting with '{}' as written by `perscale {}`", path,
                                      expected_header_prefix, producer));
  std::vector<std::vector<std::string>> rows;
  rows.push_back(split(line));
  while (std::getline(ss, line))
    if (!line.empty()) rows.push_back(split(line));
  return rows;
}

json read_sidecar(const std::string& path, const std::string& producer, const std::string& schema) {
  json j;
  try {
    j = json::parse(read_file(path + ".json", producer));
  } catch (const json::parse_error& e) {
    throw ValidationError(fmt::format("{}.json is not valid JSON: {}", path, e.what()));
  }
  if (j.value("schema", std::string()) != schema)
    throw ValidationError(fmt::format("{}.json: expected schema {} as written by `perscale {}`", path, schema, producer));
  return j;
}

std::string optional_number(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

}  // namespace

std::string format_number(double v) { return fmt::format("{:.12g}", v); }

std::string read_file(const std::string& path, const std::string& producer) {
  std::ifstream in(path);
  if (!in) throw ValidationError(fmt::format("missing input {}; produce it with `perscale {}`", path, producer));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_points_csv(const std::string& path, const std::vector<PointCloud>& clouds) {
  if (clouds.empty()) throw Error("no point clouds to write");
  const int dim = clouds.front().dim;
  auto out = open_out(path);
  out << "sample_id,t";
  for (int i = 0; i < dim; ++i) out << ",x" << i;
  out << '\n';
  json meta = {{"schema", "perscale/points/v1"}, {"producer", "sample"}, {"dim", dim}, {"clouds", json::array()}};
  for (const auto& c : clouds) {
    if (c.dim != dim) throw Error("point clouds of mixed dimension");
    for (const auto& p : c.points) {
      out << c.sample_id << ',' << format_number(c.t);
      for (int i = 0; i < dim; ++i) out << ',' << format_number(p[i]);
      out << '\n';
    }
    json entry = {{"sample_id", c.sample_id}, {"t", c.t}, {"count", c.size()}};
    if (c.region) entry["region"] = region_to_json(*c.region);
    meta["clouds"].push_back(entry);
  }
  open_out(path + ".json") << meta.dump(2) << '\n';
}

std::vector<PointCloud> read_points_csv(const std::string& path) {
  const json meta = read_sidecar(path, "sample", "perscale/points/v1");
  const int dim = meta.at("dim").get<int>();
  const auto rows = read_rows(path, "sample", "sample_id,t,x0");
  if (static_cast<int>(rows.front().size()) != 2 + dim)
    throw ValidationError(fmt::format("{}: header has {} coordinates, sidecar says {}", path, rows.front().size() - 2, dim));

  std::vector<PointCloud> clouds;
  std::map<std::pair<std::int64_t, double>, std::size_t> index;
  for (const auto& c : meta.at("clouds")) {
    PointCloud pc;
    pc.dim = dim;
    pc.sample_id = c.at("sample_id").get<std::int64_t>();
    pc.t = c.at("t").get<double>();
    if (c.contains("region")) pc.region = region_from_json(c.at("region"), "region");
    index[{pc.sample_id, pc.t}] = clouds.size();
    clouds.push_back(std::move(pc));
  }
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string where = fmt::format("{} line {}", path, r + 1);
    if (static_cast<int>(row.size()) != 2 + dim) throw ValidationError(where + ": wrong number of fields");
    const auto id = static_cast<std::int64_t>(parse_double(row[0], where));
    // Times were written with 12 digits; match them the same way.
    const double t = parse_double(row[1], where);
    auto it = index.end();
    for (auto jt = index.begin(); jt != index.end(); ++jt)
      if (jt->first.first == id && format_number(jt->first.second) == format_number(t)) it = jt;
    if (it == index.end()) throw ValidationError(where + ": cloud not listed in the sidecar");
    Point p{};
    for (int i = 0; i < dim; ++i) p[i] = parse_double(row[2 + i], where);
    clouds[it->second].points.push_back(p);
  }
  return clouds;
}

void write_diagrams_csv(const std::string& path, const std::vector<PersistenceDiagram>& diagrams) {
  auto out = open_out(path);
  out << "sample_id,t,dim,birth,death\n";
  json meta = {{"schema", "perscale/diagrams/v1"}, {"producer", "persist"}, {"diagrams", json::array()}};
  for (const auto& d : diagrams) {
    for (const auto& p : d.pairs)
      out << d.provenance.sample_id << ',' << format_number(d.provenance.t) << ',' << p.degree << ','
          << format_number(p.birth) << ',' << format_number(p.death) << '\n';
    json counts = json::array();
    for (int deg = 0; deg <= d.max_degree; ++deg) counts.push_back(d.essential_count(deg));
    json births = json::array();
    for (const auto& e : d.essentials) births.push_back({e.degree, std::stod(format_number(e.birth))});
    meta["diagrams"].push_back({{"sample_id", d.provenance.sample_id},
                                {"t", d.provenance.t},
                                {"k", d.provenance.k},
                                {"region", d.provenance.region},
                                {"max_degree", d.max_degree},
                                {"pairs", d.pairs.size()},
                                {"essential_counts", counts},
                                {"essential_births", births}});
  }
  open_out(path + ".json") << meta.dump(2) << '\n';
}

std::vector<PersistenceDiagram> read_diagrams_csv(const std::string& path) {
  const json meta = read_sidecar(path, "persist", "perscale/diagrams/v1");
  const auto rows = read_rows(path, "persist", "sample_id,t,dim,birth,death");
  std::vector<PersistenceDiagram> out;
  std::map<std::pair<std::int64_t, std::string>, std::size_t> index;
  for (const auto& m : meta.at("diagrams")) {
    PersistenceDiagram d;
    d.provenance.sample_id = m.at("sample_id").get<std::int64_t>();
    d.provenance.t = m.at("t").get<double>();
    d.provenance.k = m.value("k", -1);
    d.provenance.region = m.value("region", std::string());
    d.max_degree = m.at("max_degree").get<int>();
    for (const auto& e : m.at("essential_births")) d.essentials.push_back({e.at(0).get<int>(), e.at(1).get<double>()});
    const auto key = std::make_pair(d.provenance.sample_id, format_number(d.provenance.t));
    if (index.count(key)) throw ValidationError(path + ".json: duplicate (sample_id, t) entry");
    index[key] = out.size();
    out.push_back(std::move(d));
  }
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string where = fmt::format("{} line {}", path, r + 1);
    if (row.size() != 5) throw ValidationError(where + ": expected 5 fields");
    const auto id = static_cast<std::int64_t>(parse_double(row[0], where));
    const auto it = index.find({id, format_number(parse_double(row[1], where))});
    if (it == index.end()) throw ValidationError(where + ": diagram not listed in the sidecar");
    PersistencePair p;
    p.degree = static_cast<int>(parse_double(row[2], where));
    p.birth = parse_double(row[3], where);
    p.death = parse_double(row[4], where);
    out[it->second].pairs.push_back(p);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::size_t expected = meta.at("diagrams")[i].at("pairs").get<std::size_t>();
    if (out[i].pairs.size() != expected)
      throw ValidationError(fmt::format("{}: diagram {} has {} pairs, sidecar says {}", path, i, out[i].pairs.size(), expected));
  }
  return out;
}

void write_measure_csv(const std::string& path, const std::vector<MeasureHistogram>& hists) {
  auto out = open_out(path);
  out << "t,b_lo,b_hi,d_lo,d_hi,mean,stderr,normalization\n";
  for (const auto& h : hists) {
    const auto& g = h.grid;
    for (int i = 0; i < g.nb; ++i)
      for (int j = 0; j < g.nd; ++j) {
        if (!g.active(i, j)) continue;
        const std::size_t b = g.index(i, j);
        out << format_number(h.t) << ',' << format_number(g.b_lo(i)) << ',' << format_number(g.b_lo(i + 1)) << ','
            << format_number(g.d_lo(j)) << ',' << format_number(g.d_lo(j + 1)) << ',' << format_number(h.mean[b])
            << ',' << format_number(h.stderr_[b]) << ',' << to_string(h.normalization) << '\n';
      }
  }
}

void write_summary_csv(const std::string& path, const std::vector<double>& times, const std::vector<double>& grid,
                       const std::vector<std::vector<double>>& values) {
  if (times.size() != values.size()) throw Error("summary rows and times differ in length");
  auto out = open_out(path);
  out << "t,s,value\n";
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (values[k].size() != grid.size()) throw Error("summary values and grid differ in length");
    for (std::size_t i = 0; i < grid.size(); ++i)
      out << format_number(times[k]) << ',' << format_number(grid[i]) << ',' << format_number(values[k][i]) << '\n';
  }
}

void write_quantities_csv(const std::string& path, const std::vector<GeometricQuantities>& rows, double n_plus_delta) {
  auto out = open_out(path);
  out << "t,k,volume,n_classes,l_1,l_2,l_ndelta,d_max,pers_total,e_alpha\n";
  auto l = [](const GeometricQuantities& g, double q) -> std::optional<double> {
    const auto it = g.l.find(q);
    if (it == g.l.end()) return std::nullopt;
    return it->second;
  };
  for (const auto& g : rows)
    out << format_number(g.t) << ',' << g.k << ',' << format_number(g.volume) << ',' << format_number(g.n_classes)
        << ',' << optional_number(l(g, 1.0)) << ',' << optional_number(l(g, 2.0)) << ','
        << optional_number(l(g, n_plus_delta)) << ',' << optional_number(g.d_max) << ','
        << format_number(g.pers_total) << ',' << format_number(g.e_alpha) << '\n';
}

std::vector<GeometricQuantities> read_quantities_csv(const std::string& path, double n_plus_delta) {
  const auto rows = read_rows(path, "measure", "t,k,volume,n_classes,l_1,l_2,l_ndelta,d_max,pers_total,e_alpha");
  std::vector<GeometricQuantities> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    auto row = rows[r];
    const std::string where = fmt::format("{} line {}", path, r + 1);
    if (row.size() != 10) throw ValidationError(where + ": expected 10 fields");
    GeometricQuantities g;
    g.t = parse_double(row[0], where);
    g.k = static_cast<int>(parse_double(row[1], where));
    g.volume = parse_double(row[2], where);
    g.n_classes = parse_double(row[3], where);
    const double qs[3] = {1.0, 2.0, n_plus_delta};
    for (int i = 0; i < 3; ++i)
      if (!row[4 + i].empty()) g.l[qs[i]] = parse_double(row[4 + i], where);
    if (!row[7].empty()) g.d_max = parse_double(row[7], where);
    g.pers_total = parse_double(row[8], where);
    g.e_alpha = parse_double(row[9], where);
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace perscale
