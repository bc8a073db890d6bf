#include "gdp/generator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

namespace gdp {

namespace {

// mt19937_64 with rejection sampling; uniform_int_distribution is not
// portable across standard libraries, and generated data must be
// reproducible from the seed alone.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t below(std::uint64_t n) {
    std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                          std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % n;
  }

  std::int64_t in_range(std::int64_t lo, std::int64_t hi) {  // inclusive
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace

Database gen_random(const GenProfile& profile) {
  // schema from the query, arity consistency checked across atoms
  std::map<std::string, std::size_t> schema;
  std::vector<std::string> order;
  for (const auto& rule : profile.query.rules)
    for (const auto& atom : rule.body) {
      auto it = schema.find(atom.relation);
      if (it == schema.end()) {
        schema[atom.relation] = atom.terms.size();
        order.push_back(atom.relation);
      } else if (it->second != atom.terms.size()) {
        throw IngestError("inconsistent arity for relation '" + atom.relation + "' in query '" +
                          profile.query.name + "'");
      }
    }

  Rng rng(profile.seed);
  Database db;
  db.semantics = profile.semantics;

  std::size_t nrels = order.size();
  for (std::size_t r = 0; r < nrels; ++r) {
    const std::string& name = order[r];
    std::size_t arity = schema[name];
    std::size_t share = profile.n_tuples / nrels + (r < profile.n_tuples % nrels ? 1 : 0);

    double space = std::pow(static_cast<double>(profile.max_domain), static_cast<double>(arity));
    if (static_cast<double>(share) > space)
      throw IngestError("cannot draw " + std::to_string(share) + " distinct tuples for '" + name +
                        "' from a domain of size " + std::to_string(profile.max_domain) + "^" +
                        std::to_string(arity));

    Relation rel;
    rel.name = name;
    rel.arity = arity;
    std::set<std::vector<Value>> drawn;
    if (static_cast<double>(share) * 2 > space && space <= 2e6) {
      // dense half of the space: enumerate and partially shuffle
      auto total = static_cast<std::size_t>(space);
      std::vector<std::size_t> codes(total);
      for (std::size_t i = 0; i < total; ++i) codes[i] = i;
      for (std::size_t i = 0; i < share; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.below(total - i));
        std::swap(codes[i], codes[j]);
      }
      for (std::size_t i = 0; i < share; ++i) {
        std::vector<Value> row(arity);
        std::size_t code = codes[i];
        for (std::size_t p = arity; p-- > 0;) {
          row[p] = Value{static_cast<std::int64_t>(code % profile.max_domain) + 1};
          code /= static_cast<std::size_t>(profile.max_domain);
        }
        drawn.insert(std::move(row));
      }
    } else {
      while (drawn.size() < share) {
        std::vector<Value> row;
        row.reserve(arity);
        for (std::size_t i = 0; i < arity; ++i)
          row.push_back(Value{rng.in_range(1, profile.max_domain)});
        drawn.insert(std::move(row));
      }
    }
    for (const auto& row : drawn) {
      std::int64_t mult =
          profile.semantics == Semantics::Bag ? rng.in_range(1, profile.max_bag) : 1;
      rel.rows.emplace(row, mult);
    }
    db.relations.push_back(std::move(rel));
  }
  return db;
}

Query builtin_query(const std::string& name) {
  if (name == "q3star") return parse_query("Q(a) :- R(a,b), S(a,c), T(a,d).");
  if (name == "q3star_sj") return parse_query("Q(a) :- R(a,b), S(a,c), R(a,d).");
  if (name == "chain2") return parse_query("Q(x) :- R(x,y), S(y,z).");
  if (name == "triangle") return parse_query("Q() :- R(x,y), S(y,z), T(z,x).");
  if (name == "tri_chain_union")
    return parse_query(
        "Q(x) :- R(x,a,b), R(x,b,c), R(x,c,a).\n"
        "Q(x) :- R(x,e,f), R(x,f,g).\n");
  if (name.rfind("kstar", 0) == 0) {
    int k = std::stoi(name.substr(5));
    if (k < 1 || k > 26) throw std::invalid_argument("kstar arm count out of range: " + name);
    std::string text = "Q(a) :- ";
    for (int i = 0; i < k; ++i) {
      if (i) text += ", ";
      text += std::string(1, static_cast<char>('A' + i)) + "(a,b" + std::to_string(i + 1) + ")";
    }
    return parse_query(text + ".");
  }
  throw std::invalid_argument("unknown builtin query '" + name + "'");
}

}  // namespace gdp
