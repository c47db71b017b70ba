#include <cmath>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "nxs/dsl/expr.hpp"
#include "nxs/dsl/pipeline_file.hpp"
#include "nxs/dsl/toml.hpp"
#include "support.hpp"

namespace nxs::dsl {
namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return Errc::invalid_parameter;
}

// ---- TOML subset -----------------------------------------------------------

TEST(TomlTest, ScalarsArraysAndComments) {
  const auto doc = parse_toml(R"(
# comment
top = 1
[a.b]
s = "he said \"hi\"\t"   # trailing comment
lit = 'C:\path'
i = -42
f = 2.5e-3
big = +inf
yes = true
list = [1, 2.5, "x",
        [3, 4],]
)");
  ASSERT_EQ(doc.tables.size(), 2u);
  EXPECT_EQ(doc.tables[0].find("top")->as_int(), 1);
  const auto& t = doc.tables[1];
  EXPECT_EQ(t.path, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(t.find("s")->as_string(), "he said \"hi\"\t");
  EXPECT_EQ(t.find("lit")->as_string(), "C:\\path");
  EXPECT_EQ(t.find("i")->as_int(), -42);
  EXPECT_DOUBLE_EQ(t.find("f")->as_double(), 2.5e-3);
  EXPECT_TRUE(std::isinf(t.find("big")->as_double()));
  EXPECT_TRUE(t.find("yes")->as_bool());
  const auto& list = t.find("list")->as_list();
  ASSERT_EQ(list.size(), 4u);
  EXPECT_EQ(list[2].as_string(), "x");
  EXPECT_EQ(list[3].as_list()[1].as_int(), 4);
}

TEST(TomlTest, SyntaxErrorsCarryLine) {
  try {
    parse_toml("a = 1\nb = \n");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 2);
  }
  EXPECT_EQ(code_of([] { parse_toml("[[arr]]\n"); }), Errc::syntax_error);
  EXPECT_EQ(code_of([] { parse_toml("x = {a = 1}\n"); }), Errc::syntax_error);
  EXPECT_EQ(code_of([] { parse_toml("x = \"unterminated\n"); }), Errc::syntax_error);
  EXPECT_EQ(code_of([] { parse_toml("x = 1\nx = 2\n"); }), Errc::syntax_error);
}

// ---- pipeline files ----------------------------------------------------------

TEST(PipelineFileTest, FeedbackExampleParsesToSixNodesInOrder) {
  const auto spec = load_pipeline_file(std::string(NXS_SOURCE_DIR) + "/pipelines/feedback.toml");
  ASSERT_EQ(spec.nodes.size(), 6u);
  const std::vector<std::string> kinds{"NxReceive", "ButterFilter", "ApplyFunction",
                                       "TimeBasedEpoching", "UnivariateStat", "NxSend"};
  for (std::size_t i = 0; i < kinds.size(); ++i) EXPECT_EQ(spec.nodes[i].kind, kinds[i]);
  EXPECT_EQ(spec.nodes[1].inputs.at(0).node, "lsl");
  EXPECT_TRUE(spec.warnings.empty());
  EXPECT_DOUBLE_EQ(spec.loop_period, 0.01);
}

TEST(PipelineFileTest, DuplicateNodeName) {
  const char* text = R"(
[node.filt]
kind = "CommonAverageReference"
[node.filt]
kind = "CommonAverageReference"
)";
  EXPECT_EQ(code_of([&] { parse_pipeline(text); }), Errc::duplicate_node_name);
}

TEST(PipelineFileTest, UnknownKindSuggestsNearest) {
  try {
    parse_pipeline("[node.f]\nkind = \"ButerFilter\"\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::unknown_node_kind);
    EXPECT_NE(std::string(e.what()).find("did you mean 'ButterFilter'"), std::string::npos);
  }
}

TEST(PipelineFileTest, UnknownParameterIsWarning) {
  const auto spec = parse_pipeline("[node.g]\nkind = \"Generator\"\nfrequency = 3\n");
  ASSERT_EQ(spec.warnings.size(), 1u);
  EXPECT_NE(spec.warnings[0].find("frequency"), std::string::npos);
}

TEST(PipelineFileTest, EmptyFileIsSyntaxError) {
  EXPECT_EQ(code_of([] { parse_pipeline(""); }), Errc::syntax_error);
}

TEST(PipelineFileTest, MissingFileIsIoError) {
  EXPECT_EQ(code_of([] { load_pipeline_file("/nonexistent/none.toml"); }), Errc::io_error);
}

TEST(PipelineFileTest, MultipleInputsAndNamedPorts) {
  const auto spec = parse_pipeline(R"(
[node.src]
kind = "Generator"
[node.stim]
kind = "Stimulator"
file = "x.xml"
[node.ep]
kind = "MarkerBasedEpoching"
input = ["src", "stim:markers"]
duration = 1
)");
  ASSERT_EQ(spec.nodes[2].inputs.size(), 2u);
  EXPECT_EQ(spec.nodes[2].inputs[1].port, "markers");
}

TEST(PipelineFileTest, BuildReportsMissingRequiredParameter) {
  const auto spec = parse_pipeline("[node.src]\nkind = \"Generator\"\n[node.f]\nkind = \"ButterFilter\"\ninput = \"src\"\n");
  try {
    build_pipeline(spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::invalid_parameter);
    EXPECT_NE(std::string(e.what()).find("lowcut"), std::string::npos);
  }
}

TEST(PipelineFileTest, BuildWrapsFactoryErrorsWithNodeName) {
  const auto spec = parse_pipeline(R"(
[node.src]
kind = "Generator"
[node.f]
kind = "ButterFilter"
input = "src"
lowcut = 40
highcut = 8
)");
  try {
    build_pipeline(spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::invalid_band);
    EXPECT_NE(std::string(e.what()).find("'f'"), std::string::npos);
  }
}

TEST(PipelineFileTest, BuiltPipelineKeepsDeclarationOrder) {
  const auto spec = load_pipeline_file(std::string(NXS_SOURCE_DIR) + "/pipelines/oscillator_power.toml");
  Pipeline p = build_pipeline(spec, BuildContext{std::filesystem::temp_directory_path()});
  ASSERT_EQ(p.size(), spec.nodes.size());
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_EQ(p.node(i).name(), spec.nodes[i].name);
  EXPECT_TRUE(p.validate().ok());
}

// ---- expressions -------------------------------------------------------------

TEST(ExprTest, CommonFeatureExpressions) {
  EXPECT_EQ(parse_expression("x - 4"), Expr::binary(ExprOp::sub, Expr::variable(), Expr::constant(4)));
  EXPECT_EQ(parse_expression("x ^ 2"), Expr::binary(ExprOp::pow, Expr::variable(), Expr::constant(2)));
  EXPECT_EQ(evaluate(parse_expression("x - 4"), 6.0), 2.0);
}

TEST(ExprTest, PowerIsRightAssociative) {
  EXPECT_EQ(evaluate(parse_expression("2^3^2"), 0.0), 512.0);
  EXPECT_EQ(evaluate(parse_expression("2^(3^2)"), 0.0), 512.0);
  EXPECT_EQ(evaluate(parse_expression("(2^3)^2"), 0.0), 64.0);
}

TEST(ExprTest, Precedence) {
  EXPECT_EQ(evaluate(parse_expression("1 + 2 * 3"), 0), 7.0);
  EXPECT_EQ(evaluate(parse_expression("-2^2"), 0), -4.0);
  EXPECT_EQ(evaluate(parse_expression("2^-1"), 0), 0.5);
  EXPECT_EQ(evaluate(parse_expression("10 - 4 - 3"), 0), 3.0);
  EXPECT_EQ(evaluate(parse_expression("12 / 3 / 2"), 0), 2.0);
  EXPECT_EQ(evaluate(parse_expression("max(x, 3) + min(1, abs(-x))"), -5.0), 4.0);
  EXPECT_DOUBLE_EQ(evaluate(parse_expression("exp(log(x)) * sqrt(4)"), 3.0), 6.0);
  EXPECT_EQ(evaluate(parse_expression("1.5e1"), 0), 15.0);
}

TEST(ExprTest, SyntaxErrorsReportColumn) {
  const std::vector<std::pair<std::string, int>> cases{{"x +", 4}, {"(x", 3}, {"x $ 2", 3}, {"foo(x)", 1}, {"", 1}};
  for (const auto& [text, col] : cases) {
    try {
      parse_expression(text);
      ADD_FAILURE() << text;
    } catch (const SyntaxError& e) {
      EXPECT_EQ(e.column(), col) << text;
    }
  }
  EXPECT_THROW(parse_expression("min(1)"), SyntaxError);
  EXPECT_THROW(parse_expression("sqrt(1, 2)"), SyntaxError);
}

TEST(ExprTest, DomainErrors) {
  EXPECT_EQ(code_of([] { evaluate(parse_expression("log(x)"), 0.0); }), Errc::domain_error);
  EXPECT_EQ(code_of([] { evaluate(parse_expression("sqrt(x)"), -1.0); }), Errc::domain_error);
  EXPECT_TRUE(std::isinf(evaluate(parse_expression("1 / x"), 0.0)));
}

TEST(ExprTest, ChunkEvaluation) {
  Chunk c = test::make_chunk(SampleTable{{-2.0}, {3.0}}, 10.0);
  const Chunk sq = eval_expression(parse_expression("x^2"), c);
  EXPECT_EQ(sq.data(0, 0), 4.0);
  EXPECT_EQ(sq.data(1, 0), 9.0);
  EXPECT_EQ(sq.timestamps, c.timestamps);

  const Chunk r = test::make_chunk(test::random_table(50, 4, 3), 100.0, 1.0);
  EXPECT_EQ(eval_expression(parse_expression("x"), r), r);
}

TEST(ExprTest, NonFiniteResultsAreCounted) {
  Chunk c = test::make_chunk(SampleTable{{0.0, 1.0}, {2.0, 0.0}}, 10.0);
  EvalStats stats;
  const Chunk out = eval_expression(parse_expression("1 / x"), c, &stats);
  EXPECT_EQ(stats.nonfinite, 2u);
  EXPECT_TRUE(std::isinf(out.data(0, 0)));
}

TEST(ExprTest, DomainErrorInChunkNamesLocation) {
  Chunk c = test::make_chunk(SampleTable{{1.0, 1.0}, {1.0, -1.0}}, 10.0, 0.0, {"C3", "C4"});
  try {
    eval_expression(parse_expression("sqrt(x)"), c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::domain_error);
    EXPECT_NE(std::string(e.what()).find("row 1, channel 1"), std::string::npos);
  }
}

TEST(ExprTest, EvaluationIsStateless) {
  const Expr e = parse_expression("x^2 - 3*x + 1");
  const Chunk c = test::make_chunk(test::random_table(100, 3, 9), 100.0);
  const Chunk a = eval_expression(e, c);
  const Chunk b = eval_expression(e, c);
  EXPECT_EQ(a, b);
  // Each sample depends on itself only: a split evaluation matches.
  const Chunk parts = concat({eval_expression(e, slice_rows(c, 0, 37)), eval_expression(e, slice_rows(c, 37, 63))});
  EXPECT_EQ(parts, a);
}

// Independent oracle: random trees rendered with minimal parentheses by an
// own precedence table and evaluated by an own interpreter, then compared
// with parse + evaluate.
struct Gen {
  std::mt19937_64 rng;
  struct Node {
    std::string op;  // "c", "x", "neg", "+", "-", "*", "/", "^", or a function name
    double value = 0.0;
    std::vector<Node> kids;
  };

  int pick(int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); }

  Node make(int depth) {
    if (depth == 0 || pick(4) == 0) {
      if (pick(2) == 0) return {"x", 0.0, {}};
      const double v = static_cast<double>(pick(40)) / 4.0;
      return {"c", v, {}};
    }
    static const char* binops[] = {"+", "-", "*", "/", "^", "min", "max"};
    static const char* unops[] = {"neg", "abs", "sqrt", "log", "exp"};
    if (pick(3) == 0) return {unops[pick(5)], 0.0, {make(depth - 1)}};
    return {binops[pick(7)], 0.0, {make(depth - 1), make(depth - 1)}};
  }

  static std::string num(double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
  }

  // Returns text and its binding level: 1 sum, 2 product, 3 unary, 4 power, 5 atom.
  static std::pair<std::string, int> render(const Node& n) {
    auto wrap = [](const std::pair<std::string, int>& p, int need) {
      return p.second >= need ? p.first : "(" + p.first + ")";
    };
    if (n.op == "x") return {"x", 5};
    if (n.op == "c") return {num(n.value), 5};
    if (n.op == "neg") return {"-" + wrap(render(n.kids[0]), 3), 3};
    if (n.op == "+" || n.op == "-") {
      return {wrap(render(n.kids[0]), 1) + " " + n.op + " " + wrap(render(n.kids[1]), 2), 1};
    }
    if (n.op == "*" || n.op == "/") {
      return {wrap(render(n.kids[0]), 2) + " " + n.op + " " + wrap(render(n.kids[1]), 3), 2};
    }
    if (n.op == "^") return {wrap(render(n.kids[0]), 5) + "^" + wrap(render(n.kids[1]), 3), 4};
    std::string s = n.op + "(" + render(n.kids[0]).first;
    if (n.kids.size() == 2) s += ", " + render(n.kids[1]).first;
    return {s + ")", 5};
  }

  struct DomainFault {};

  static double eval(const Node& n, double x) {
    if (n.op == "x") return x;
    if (n.op == "c") return n.value;
    const double a = eval(n.kids[0], x);
    if (n.op == "neg") return -a;
    if (n.op == "abs") return std::fabs(a);
    if (n.op == "sqrt") {
      if (a < 0.0) throw DomainFault{};
      return std::sqrt(a);
    }
    if (n.op == "log") {
      if (a <= 0.0) throw DomainFault{};
      return std::log(a);
    }
    if (n.op == "exp") return std::exp(a);
    const double b = eval(n.kids[1], x);
    if (n.op == "+") return a + b;
    if (n.op == "-") return a - b;
    if (n.op == "*") return a * b;
    if (n.op == "/") return a / b;
    if (n.op == "^") return std::pow(a, b);
    if (n.op == "min") return std::fmin(a, b);
    return std::fmax(a, b);
  }
};

TEST(ExprTest, RandomExpressionsMatchIndependentOracle) {
  Gen gen{std::mt19937_64(2024)};
  int domain_faults = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto tree = gen.make(4);
    const std::string text = Gen::render(tree).first;
    const double x = static_cast<double>(gen.pick(200) - 100) / 8.0;
    Expr parsed;
    ASSERT_NO_THROW(parsed = parse_expression(text)) << text;
    double expected = 0.0;
    bool fault = false;
    try {
      expected = Gen::eval(tree, x);
    } catch (const Gen::DomainFault&) {
      fault = true;
    }
    if (fault) {
      ++domain_faults;
      EXPECT_EQ(code_of([&] { evaluate(parsed, x); }), Errc::domain_error) << text;
      continue;
    }
    const double got = evaluate(parsed, x);
    if (std::isnan(expected)) {
      EXPECT_TRUE(std::isnan(got)) << text;
    } else {
      EXPECT_EQ(got, expected) << text << " at x=" << x;
    }
    // Rendering round-trip.
    EXPECT_EQ(parse_expression(to_string(parsed)), parsed) << text;
  }
  EXPECT_GT(domain_faults, 0);
}

}  // namespace
}  // namespace nxs::dsl
