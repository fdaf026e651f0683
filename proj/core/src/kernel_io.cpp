#include "pcot/kernel_io.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace pcot {

namespace {

using nlohmann::json;

Domain domain_from_json(const json& rows, std::size_t index_dim, std::size_t param_dim,
                        const std::string& where) {
  Domain d;
  d.index_dim = index_dim;
  d.param_dim = param_dim;
  for (const auto& row : rows) {
    IntVec r;
    for (const auto& c : row) r.push_back(c.get<std::int64_t>());
    if (r.size() != d.row_len())
      fail(ErrorKind::Parse, where + ": inequality row has length " +
                                 std::to_string(r.size()) + ", expected " +
                                 std::to_string(d.row_len()));
    d.rows.push_back(std::move(r));
  }
  return d;
}

json domain_to_json(const Domain& d) {
  json rows = json::array();
  for (const auto& r : d.rows) rows.push_back(r);
  return rows;
}

void walk_reads(const ExprPtr& e, const Prdg& p, const std::string& where) {
  if (!e) return;
  if (e->kind == Expr::Kind::Read) {
    const ArrayDecl* a = p.find_array(e->array);
    if (!a) fail(ErrorKind::Validation, where + ": read of undeclared array " + e->array);
    if (e->subscripts.size() != a->rank)
      fail(ErrorKind::Validation, where + ": array " + e->array + " has rank " +
                                      std::to_string(a->rank) + " but read uses " +
                                      std::to_string(e->subscripts.size()) +
                                      " subscripts");
  }
  if (e->lhs) walk_reads(e->lhs, p, where);
  if (e->rhs) walk_reads(e->rhs, p, where);
}

void validate(const Prdg& p) {
  const std::size_t full = p.indices.size();
  if (full == 0) fail(ErrorKind::Validation, "kernel has no indices");
  for (const auto& a : p.arrays) {
    if (a.extents.size() != a.rank)
      fail(ErrorKind::Validation, "array " + a.name + ": rank/extents mismatch");
    for (const auto& ext : a.extents)
      if (ext.coeffs.size() != p.params.size())
        fail(ErrorKind::Validation, "array " + a.name +
                                        ": extents must depend on params only");
  }
  for (const auto& s : p.statements) {
    const std::string where = "statement " + s.id;
    if (s.depth == 0 || s.depth > full)
      fail(ErrorKind::Validation, where + ": bad depth");
    if (s.domain.index_dim != s.depth || s.domain.param_dim != p.params.size())
      fail(ErrorKind::Validation, where + ": domain shape mismatch");
    const ArrayDecl* a = p.find_array(s.writes.array);
    if (!a) fail(ErrorKind::Validation, where + ": write to undeclared array");
    if (s.writes.subscripts.size() != a->rank)
      fail(ErrorKind::Validation, where + ": write subscript arity mismatch");
    walk_reads(s.body, p, where);
  }
  for (const auto& e : p.edges) {
    const Statement* src = p.find_statement(e.src);
    const Statement* dst = p.find_statement(e.dst);
    const std::string where = "edge " + e.src + " -> " + e.dst;
    if (!src || !dst) fail(ErrorKind::Validation, where + ": unknown statement");
    if (e.context.index_dim != src->depth || e.context.param_dim != p.params.size())
      fail(ErrorKind::Validation, where + ": context shape mismatch");
    if (e.fn.out_dim() != dst->depth ||
        (!e.fn.linear.empty() && e.fn.in_dim() != src->depth))
      fail(ErrorKind::Validation, where + ": dependence function shape mismatch");
  }
  std::size_t expected = 0;
  for (auto b : p.tilable_band) {
    if (b != expected++)
      fail(ErrorKind::Validation,
           "tilable_band must be the leading index positions 0..d-1");
  }
  if (p.tilable_band.empty())
    fail(ErrorKind::Validation, "tilable_band must not be empty");

  // Sampled semantic checks at the declared check_params binding.
  for (const auto& e : p.edges) {
    const Statement* dst = p.find_statement(e.dst);
    auto pts = enumerate_points(e.context, p.check_params, 200'000);
    for (const auto& z : pts) {
      IntVec y = apply_affine(e.fn, z);
      if (!bind_params(dst->domain, p.check_params).contains(y, {}))
        fail(ErrorKind::Validation, "edge " + e.src + " -> " + e.dst +
                                        ": dependence target escapes producer domain");
    }
  }
  DependenceReport rep = check_dependences_sampled(p, p.check_params);
  for (const auto& er : rep.edges)
    if (er.flagged)
      fail(ErrorKind::Validation,
           "edge " + er.src + " -> " + er.dst +
               ": negative dependence component inside the tilable band");
}

}  // namespace

Prdg parse_kernel(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::Parse, std::string("kernel parse error: ") + e.what());
  }
  Prdg p;
  try {
    p.name = j.at("name").get<std::string>();
    p.params = j.at("params").get<std::vector<std::string>>();
    p.indices = j.at("indices").get<std::vector<std::string>>();
    p.check_params.assign(p.params.size(), 8);
    if (j.contains("check_params")) {
      for (std::size_t i = 0; i < p.params.size(); ++i)
        p.check_params[i] = j["check_params"].at(p.params[i]).get<std::int64_t>();
    }
    ExprScope param_scope{{}, p.params};
    for (const auto& ja : j.at("arrays")) {
      ArrayDecl a;
      a.name = ja.at("name").get<std::string>();
      a.rank = ja.at("rank").get<std::size_t>();
      for (const auto& ext : ja.at("extents"))
        a.extents.push_back(parse_affine(ext.get<std::string>(), param_scope));
      std::string kind = ja.value("kind", "temp");
      if (kind == "input") a.kind = ArrayKind::Input;
      else if (kind == "output") a.kind = ArrayKind::Output;
      else if (kind == "temp") a.kind = ArrayKind::Temp;
      else fail(ErrorKind::Parse, "array " + a.name + ": unknown kind " + kind);
      p.arrays.push_back(std::move(a));
    }
    for (const auto& js : j.at("statements")) {
      Statement s;
      s.id = js.at("id").get<std::string>();
      s.depth = js.value("depth", p.indices.size());
      ExprScope scope = p.scope_at_depth(s.depth);
      s.domain = domain_from_json(js.at("domain"), s.depth, p.params.size(),
                                  "statement " + s.id);
      s.writes.array = js.at("writes").at("array").get<std::string>();
      for (const auto& sub : js.at("writes").at("subscripts"))
        s.writes.subscripts.push_back(parse_affine(sub.get<std::string>(), scope));
      s.body = parse_expr(js.at("body").get<std::string>(), scope);
      p.statements.push_back(std::move(s));
    }
    for (const auto& je : j.value("edges", json::array())) {
      PrdgEdge e;
      e.src = je.at("src").get<std::string>();
      e.dst = je.at("dst").get<std::string>();
      const Statement* src = p.find_statement(e.src);
      if (!src) fail(ErrorKind::Validation, "edge from unknown statement " + e.src);
      e.context = domain_from_json(je.at("context"), src->depth, p.params.size(),
                                   "edge " + e.src + " -> " + e.dst);
      for (const auto& row : je.at("fn").at("A")) {
        IntVec r;
        for (const auto& c : row) r.push_back(c.get<std::int64_t>());
        e.fn.linear.push_back(std::move(r));
      }
      for (const auto& c : je.at("fn").at("b"))
        e.fn.constant.push_back(c.get<std::int64_t>());
      std::string kind = je.value("kind", "flow");
      if (kind == "flow") e.kind = EdgeKind::Flow;
      else if (kind == "memory-based") e.kind = EdgeKind::MemoryBased;
      else fail(ErrorKind::Parse, "edge: unknown kind " + kind);
      p.edges.push_back(std::move(e));
    }
    p.tilable_band = j.at("tilable_band").get<std::vector<std::size_t>>();
  } catch (const json::exception& e) {
    fail(ErrorKind::Parse, std::string("kernel parse error: ") + e.what());
  }
  validate(p);
  return p;
}

Prdg parse_kernel_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open kernel file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_kernel(ss.str());
}

std::string print_kernel(const Prdg& p) {
  json j;
  j["name"] = p.name;
  j["params"] = p.params;
  j["indices"] = p.indices;
  json cp = json::object();
  for (std::size_t i = 0; i < p.params.size(); ++i) cp[p.params[i]] = p.check_params[i];
  j["check_params"] = cp;
  ExprScope param_scope{{}, p.params};
  j["arrays"] = json::array();
  for (const auto& a : p.arrays) {
    json ja;
    ja["name"] = a.name;
    ja["rank"] = a.rank;
    json exts = json::array();
    for (const auto& e : a.extents) exts.push_back(print_affine(e, param_scope));
    ja["extents"] = exts;
    ja["kind"] = a.kind == ArrayKind::Input    ? "input"
                 : a.kind == ArrayKind::Output ? "output"
                                               : "temp";
    j["arrays"].push_back(ja);
  }
  j["statements"] = json::array();
  for (const auto& s : p.statements) {
    ExprScope scope = p.scope_at_depth(s.depth);
    json js;
    js["id"] = s.id;
    js["depth"] = s.depth;
    js["domain"] = domain_to_json(s.domain);
    json subs = json::array();
    for (const auto& sub : s.writes.subscripts) subs.push_back(print_affine(sub, scope));
    js["writes"] = {{"array", s.writes.array}, {"subscripts", subs}};
    js["body"] = print_expr(s.body, scope);
    j["statements"].push_back(js);
  }
  j["edges"] = json::array();
  for (const auto& e : p.edges) {
    json je;
    je["src"] = e.src;
    je["dst"] = e.dst;
    je["context"] = domain_to_json(e.context);
    json fa = json::array();
    for (const auto& row : e.fn.linear) fa.push_back(row);
    je["fn"] = {{"A", fa}, {"b", e.fn.constant}};
    je["kind"] = e.kind == EdgeKind::Flow ? "flow" : "memory-based";
    j["edges"].push_back(je);
  }
  j["tilable_band"] = p.tilable_band;
  return j.dump(2) + "\n";
}

std::string find_kernel_file(const std::string& name_or_path) {
  namespace fs = std::filesystem;
  auto exists = [](const fs::path& p) {
    std::error_code ec;
    return fs::is_regular_file(p, ec);
  };
  if (exists(name_or_path)) return name_or_path;
  std::vector<std::string> dirs;
  if (const char* env = std::getenv("PCOT_KERNEL_PATH")) {
    std::string s = env;
    std::size_t start = 0;
    while (start <= s.size()) {
      std::size_t colon = s.find(':', start);
      if (colon == std::string::npos) colon = s.size();
      if (colon > start) dirs.push_back(s.substr(start, colon - start));
      start = colon + 1;
    }
  }
  dirs.push_back("kernels");
  for (const auto& dir : dirs) {
    for (const std::string& stem : {name_or_path, name_or_path + ".kernel"}) {
      fs::path cand = fs::path(dir) / stem;
      if (exists(cand)) return cand.string();
    }
  }
  return {};
}

}  // namespace pcot
