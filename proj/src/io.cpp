#include "cutgraph/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cutgraph/errors.hpp"

namespace cutgraph {

namespace {

using nlohmann::json;

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
  if (!out) throw ConfigError("write failed for " + path);
}

StepKernel kernel_from_json(const json& j, const std::string& where) {
  if (!j.contains("masses") || !j.contains("values"))
    throw ConfigError(where + ": kernel needs 'masses' and 'values'");
  std::vector<double> masses = j.at("masses").get<std::vector<double>>();
  const auto& rows = j.at("values");
  const std::size_t m = masses.size();
  if (rows.size() != m)
    throw ConfigError(where + ": 'values' must have one row per type");
  std::vector<double> values;
  values.reserve(m * m);
  for (const auto& row : rows) {
    if (row.size() != m)
      throw ConfigError(where + ": 'values' rows must have m entries");
    for (const auto& v : row) values.push_back(v.get<double>());
  }
  const bool is_signed = j.value("signed", false);
  try {
    return StepKernel(std::move(masses), std::move(values),
                      is_signed ? StepKernel::Sign::Signed
                                : StepKernel::Sign::NonNegative);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

json kernel_to_json(const StepKernel& k) {
  json j;
  j["masses"] = k.masses();
  json rows = json::array();
  const std::size_t m = k.type_count();
  for (std::size_t i = 0; i < m; ++i) {
    json row = json::array();
    for (std::size_t c = 0; c < m; ++c) row.push_back(k.value(i, c));
    rows.push_back(std::move(row));
  }
  j["values"] = std::move(rows);
  if (k.is_signed()) j["signed"] = true;
  return j;
}

}  // namespace

StepKernel load_kernel(const std::string& path) {
  return kernel_from_json(read_json(path), path);
}

void save_kernel(const StepKernel& k, const std::string& path) {
  write_text(path, kernel_to_json(k).dump(2) + "\n");
}

WeightMatrix load_matrix(const std::string& path) {
  const json j = read_json(path);
  if (!j.contains("n")) throw ConfigError(path + ": matrix needs 'n'");
  const std::size_t n = j.at("n").get<std::size_t>();

  if (j.contains("types")) {
    std::vector<std::uint32_t> types =
        j.at("types").get<std::vector<std::uint32_t>>();
    if (types.size() != n)
      throw ConfigError(path + ": 'types' must have n entries");
    StepKernel table = kernel_from_json(j.at("kernel"), path);
    try {
      return WeightMatrix::from_types(std::move(types), std::move(table));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(path + ": " + e.what());
    }
  }

  if (!j.contains("entries"))
    throw ConfigError(path + ": matrix needs 'entries'");
  const auto& rows = j.at("entries");
  std::vector<double> entries(n * n, 0.0);
  if (j.value("sparse", false)) {
    for (const auto& triple : rows) {
      if (triple.size() != 3)
        throw ConfigError(path + ": sparse entries are [i, j, a] triples");
      const std::size_t i = triple[0].get<std::size_t>();
      const std::size_t c = triple[1].get<std::size_t>();
      if (i >= n || c >= n || i > c)
        throw ConfigError(path + ": sparse entry needs 0 <= i <= j < n");
      const double v = triple[2].get<double>();
      entries[i * n + c] = v;
      entries[c * n + i] = v;
    }
  } else {
    if (rows.size() != n)
      throw ConfigError(path + ": dense 'entries' must have n rows");
    for (std::size_t i = 0; i < n; ++i) {
      if (rows[i].size() != n)
        throw ConfigError(path + ": dense rows must have n entries");
      for (std::size_t c = 0; c < n; ++c)
        entries[i * n + c] = rows[i][c].get<double>();
    }
  }
  try {
    return WeightMatrix::dense(n, std::move(entries));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void save_matrix(const WeightMatrix& a, const std::string& path, bool sparse) {
  json j;
  j["n"] = a.size();
  if (a.typed()) {
    j["types"] = a.types();
    j["kernel"] = kernel_to_json(a.table());
  } else if (sparse) {
    j["sparse"] = true;
    json triples = json::array();
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t c = i; c < a.size(); ++c)
        if (a.entry(i, c) != 0.0)
          triples.push_back(json::array({i, c, a.entry(i, c)}));
    j["entries"] = std::move(triples);
  } else {
    json rows = json::array();
    for (std::size_t i = 0; i < a.size(); ++i) {
      json row = json::array();
      for (std::size_t c = 0; c < a.size(); ++c) row.push_back(a.entry(i, c));
      rows.push_back(std::move(row));
    }
    j["entries"] = std::move(rows);
  }
  write_text(path, j.dump(2) + "\n");
}

SparseGraph read_graph(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw ConfigError("graph file: empty input");
  std::istringstream hs(header);
  std::uint32_t n = 0;
  std::uint64_t mcount = 0;
  std::string flag;
  if (!(hs >> n >> mcount)) throw ConfigError("graph file: bad header");
  bool multi = false;
  if (hs >> flag) {
    if (flag != "multi") throw ConfigError("graph file: bad header flag");
    multi = true;
  }
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  edges.reserve(mcount);
  for (std::uint64_t e = 0; e < mcount; ++e) {
    std::uint32_t u = 0, v = 0;
    if (!(in >> u >> v)) throw ConfigError("graph file: truncated edge list");
    edges.emplace_back(u, v);
  }
  try {
    return make_graph(n, std::move(edges), multi);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("graph file: ") + e.what());
  }
}

void write_graph(const SparseGraph& g, std::ostream& out) {
  out << g.n << ' ' << g.edges.size();
  if (g.multigraph) out << " multi";
  out << '\n';
  for (const auto& [u, v] : g.edges) out << u << ' ' << v << '\n';
}

SparseGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  return read_graph(in);
}

void save_graph(const SparseGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  write_graph(g, out);
  if (!out) throw ConfigError("write failed for " + path);
}

SparseHypermatrix load_hypermatrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::uint32_t n = 0, cap = 0;
  if (!(in >> n >> cap)) throw ConfigError(path + ": bad hypermatrix header");
  try {
    SparseHypermatrix h(n, cap);
    std::uint32_t r = 0;
    while (in >> r) {
      std::vector<std::uint32_t> tuple(r);
      for (auto& x : tuple)
        if (!(in >> x)) throw ConfigError(path + ": truncated tuple");
      double value = 0.0;
      if (!(in >> value)) throw ConfigError(path + ": tuple missing value");
      h.set(std::move(tuple), value);
    }
    return h;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void save_hypermatrix(const SparseHypermatrix& h, const std::string& path) {
  std::ostringstream out;
  out << h.size() << ' ' << h.max_arity() << '\n';
  for (const auto& [tuple, value] : h.entries()) {
    out << tuple.size();
    for (std::uint32_t x : tuple) out << ' ' << x;
    out << ' ' << value << '\n';
  }
  write_text(path, out.str());
}

HyperStepKernel load_hyperkernel(const std::string& path) {
  const json j = read_json(path);
  if (!j.contains("masses") || !j.contains("layers"))
    throw ConfigError(path + ": hyperkernel needs 'masses' and 'layers'");
  std::vector<double> masses = j.at("masses").get<std::vector<double>>();
  std::vector<ArityKernel> layers;
  for (const auto& layer : j.at("layers")) {
    ArityKernel a;
    a.arity = layer.at("arity").get<std::uint32_t>();
    a.values = layer.at("values").get<std::vector<double>>();
    layers.push_back(std::move(a));
  }
  try {
    return HyperStepKernel(std::move(masses), std::move(layers));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void save_hyperkernel(const HyperStepKernel& k, const std::string& path) {
  json j;
  j["masses"] = k.masses();
  json layers = json::array();
  for (const ArityKernel& a : k.layers()) {
    json layer;
    layer["arity"] = a.arity;
    layer["values"] = a.values;
    layers.push_back(std::move(layer));
  }
  j["layers"] = std::move(layers);
  write_text(path, j.dump(2) + "\n");
}

}  // namespace cutgraph
