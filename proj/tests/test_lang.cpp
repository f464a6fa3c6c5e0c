#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "smc/error.hpp"
#include "smc/lang/lexer.hpp"
#include "support.hpp"

namespace {

using namespace smc;
using namespace smc::lang;
using testing_support::data_path;

std::string lg_source() { return cli::read_text(data_path("lg.mod")); }
std::string sv_source() { return cli::read_text(data_path("sv.mod")); }

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string compile_error_of(const std::string& text, const CompileInputs& in = {}) {
  try {
    compile(parse(text), in);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(Parse, StochasticWithVarianceTag) {
  const auto m = parse("x[1] ~ dnorm(0, var = 1)");
  ASSERT_EQ(m.statements.size(), 1u);
  const auto& s = std::get<Stochastic>(m.statements[0].node);
  EXPECT_EQ(s.target.name, "x");
  ASSERT_TRUE(s.target.index);
  EXPECT_EQ(s.target.index->number, 1.0);
  EXPECT_EQ(s.dist.kind, DistKind::normal);
  EXPECT_EQ(s.dist.scale, ScaleTag::variance);
  EXPECT_EQ(s.params[0]->number, 0.0);
  EXPECT_EQ(s.params[1]->number, 1.0);
}

TEST(Parse, DeterministicExpressionTree) {
  const auto m = parse("phi <- 2 * phiStar - 1");
  const auto& d = std::get<Deterministic>(m.statements[0].node);
  EXPECT_EQ(d.target.name, "phi");
  EXPECT_FALSE(d.target.index);
  ASSERT_EQ(d.value->kind, Expr::Kind::binary);
  EXPECT_EQ(d.value->op, '-');
  EXPECT_EQ(d.value->args[0]->op, '*');
  EXPECT_EQ(d.value->args[0]->args[1]->name, "phiStar");
}

TEST(Parse, NamedArgumentsMapToCanonicalOrder) {
  const auto m = parse("a ~ dgamma(rate = 20, shape = 5)\nb ~ dnorm(sd = 2, mean = 1)");
  const auto& a = std::get<Stochastic>(m.statements[0].node);
  EXPECT_EQ(a.params[0]->number, 5.0);
  EXPECT_EQ(a.params[1]->number, 20.0);
  const auto& b = std::get<Stochastic>(m.statements[1].node);
  EXPECT_EQ(b.dist.scale, ScaleTag::sd);
  EXPECT_EQ(b.params[0]->number, 1.0);
}

TEST(Parse, UnknownDistributionNamed) {
  EXPECT_NE(error_of("x[t] ~ dfoo(1)").find("dfoo"), std::string::npos);
}

TEST(Parse, MalformedNamedArgument) {
  EXPECT_FALSE(error_of("x ~ dnorm(0, var = )").empty());
  EXPECT_FALSE(error_of("x ~ dnorm(0, bogus = 1)").empty());
  EXPECT_FALSE(error_of("x ~ dnorm(0, var = 1, sd = 2)").empty());
  EXPECT_FALSE(error_of("x ~ dnorm(0)").empty());
}

TEST(Parse, ErrorsCarryLineAndColumn) {
  try {
    parse("x ~ dnorm(0, 1)\ny ~ dnorm(x,, 1)");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_GT(e.column(), 1);
  }
  EXPECT_THROW(parse("x ~ dnorm(0, 1) $"), ParseError);
}

TEST(Parse, PrecedenceAndUnaryMinus) {
  const auto m = parse("a <- -2 ^ 2\nb <- 1 - 2 - 3\nc <- 2 ^ 3 ^ 2");
  const auto& a = std::get<Deterministic>(m.statements[0].node).value;
  EXPECT_EQ(a->kind, Expr::Kind::negate);  // -(2 ^ 2)
  EXPECT_EQ(a->args[0]->op, '^');
  EXPECT_EQ(to_string(*a), "-2^2");
  const auto& b = std::get<Deterministic>(m.statements[1].node).value;
  EXPECT_EQ(b->args[0]->op, '-');  // left associative
  const auto& c = std::get<Deterministic>(m.statements[2].node).value;
  EXPECT_EQ(c->args[1]->op, '^');  // right associative
}

TEST(Parse, RoundTripIsFixedPoint) {
  for (const auto& src : {lg_source(), sv_source()}) {
    const std::string once = to_string(parse(src));
    const std::string twice = to_string(parse(once));
    EXPECT_EQ(once, twice);
  }
}

TEST(Lexer, NumbersAndArrows) {
  const auto toks = tokenize("x <- .8 * 1e-3");
  ASSERT_GE(toks.size(), 5u);
  EXPECT_EQ(toks[1].kind, TokenKind::assign);
  EXPECT_DOUBLE_EQ(toks[2].number, 0.8);
  EXPECT_DOUBLE_EQ(toks[4].number, 1e-3);
}

TEST(Compile, LinearGaussianNodeCounts) {
  const auto m = testing_support::lg_model();
  std::size_t latent = 0, obs = 0, params = 0;
  for (const auto& n : m.graph.nodes()) {
    latent += n.role == NodeRole::latent;
    obs += n.role == NodeRole::observation;
    params += n.role == NodeRole::parameter;
  }
  EXPECT_EQ(latent, 10u);
  EXPECT_EQ(obs, 10u);
  EXPECT_EQ(params, 0u);
  EXPECT_EQ(m.graph.size(), 20u);
}

TEST(Compile, StochasticVolatilityNodeCounts) {
  const auto m = testing_support::sv_model();
  std::vector<std::string> params, determ;
  std::size_t latent = 0, obs = 0;
  for (const auto& n : m.graph.nodes()) {
    if (n.role == NodeRole::parameter) params.push_back(n.name);
    if (n.role == NodeRole::deterministic) determ.push_back(n.name);
    latent += n.role == NodeRole::latent;
    obs += n.role == NodeRole::observation;
  }
  std::sort(params.begin(), params.end());
  std::sort(determ.begin(), determ.end());
  EXPECT_EQ(latent, 67u);
  EXPECT_EQ(obs, 67u);
  EXPECT_EQ(params, (std::vector<std::string>{"betaSquaredInv", "phiStar", "sigmaSquaredInv", "x0"}));
  EXPECT_EQ(determ, (std::vector<std::string>{"betaSquared", "phi"}));
}

TEST(Compile, LatentNodesAreTimeOrdered) {
  const auto m = testing_support::lg_model();
  const auto xs = m.graph.latent_nodes("x");
  ASSERT_EQ(xs.size(), 10u);
  for (std::size_t t = 0; t < xs.size(); ++t) EXPECT_EQ(m.graph.node(xs[t]).name, "x[" + std::to_string(t + 1) + "]");
  EXPECT_THROW(m.graph.latent_nodes("z"), LookupError);
  EXPECT_EQ(testing_support::sv_model().graph.latent_nodes("x").size(), 67u);
}

TEST(Compile, Dependencies) {
  const auto lg = testing_support::lg_model();
  const auto d = lg.graph.dependencies(lg.graph.at("x[3]"), DependencyFilter::data_only);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(lg.graph.node(d[0]).name, "y[3]");
  for (auto f : {DependencyFilter::all, DependencyFilter::deterministic_only, DependencyFilter::data_only})
    EXPECT_TRUE(lg.graph.dependencies(lg.graph.at("y[3]"), f).empty());

  const auto sv = testing_support::sv_model();
  const auto p = sv.graph.dependencies(sv.graph.at("phiStar"), DependencyFilter::deterministic_only);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(sv.graph.node(p[0]).name, "phi");
}

TEST(Compile, MissingConstantIsUnresolved) {
  const std::string msg = compile_error_of(sv_source());
  EXPECT_NE(msg.find("unresolved identifier"), std::string::npos) << msg;
  EXPECT_NE(msg.find("T"), std::string::npos);
}

TEST(Compile, StructuralErrors) {
  EXPECT_NE(compile_error_of("a ~ dnorm(0, 1)\na ~ dnorm(1, 1)").find("duplicate"), std::string::npos);
  EXPECT_NE(compile_error_of("a <- b + 1\nb <- a * 2").find("cyclic"), std::string::npos);
  CompileInputs in;
  in.data["y"] = std::vector<double>(11, 0.0);
  EXPECT_NE(compile_error_of(lg_source(), in).find("nonexistent node 'y[11]'"), std::string::npos);
  CompileInputs bad;
  bad.data["q"] = {1.0};
  EXPECT_FALSE(compile_error_of(lg_source(), bad).empty());
}

TEST(Compile, DeterministicInitIsIgnoredWithWarning) {
  CompileInputs in;
  in.constants["T"] = 67;
  in.inits["phi"] = 0.9702;
  const auto g = compile(parse(sv_source()), in);
  ASSERT_FALSE(g.warnings().empty());
  EXPECT_NE(g.warnings()[0].find("phi"), std::string::npos);
  EXPECT_FALSE(g.node(g.at("phi")).init);
}

// Random admissible models: every node refers only to nodes declared as
// "earlier" in a hidden order, but statements are emitted shuffled.
TEST(Compile, FuzzedModelsAreTopologicallyOrdered) {
  std::mt19937_64 gen(123);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(gen() % 15);
    std::vector<std::string> lines;
    for (int i = 0; i < n; ++i) {
      std::string expr = "1";
      const int refs = i == 0 ? 0 : static_cast<int>(gen() % 3);
      for (int r = 0; r < refs; ++r) expr += " + 0.5 * v" + std::to_string(gen() % i);
      if (gen() % 2)
        lines.push_back("v" + std::to_string(i) + " ~ dnorm(" + expr + ", var = 1)");
      else
        lines.push_back("v" + std::to_string(i) + " <- " + expr);
    }
    std::shuffle(lines.begin(), lines.end(), gen);
    std::string src;
    for (const auto& l : lines) src += l + "\n";
    const auto g = compile(parse(src), {});
    ASSERT_EQ(g.size(), static_cast<std::size_t>(n));
    for (NodeId id = 0; id < g.size(); ++id)
      for (NodeId p : g.node(id).parents) ASSERT_LT(g.node(p).topo_rank, g.node(id).topo_rank) << src;
  }
}

}  // namespace
