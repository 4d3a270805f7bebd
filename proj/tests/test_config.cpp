#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "fsi/config.hpp"

using namespace fsi;

namespace {

std::string message_of(const std::string& text) {
    try {
        parse_config_text(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

std::filesystem::path scratch(const std::string& name) {
    auto d = std::filesystem::temp_directory_path() / "fsi_test_config" / name;
    std::filesystem::create_directories(d);
    return d;
}

}  // namespace

TEST(ParseConfig, EmptyTextGivesDefaults) {
    const ModelConfig c = parse_config_text("");
    EXPECT_TRUE(same_config(c, ModelConfig{}));
    EXPECT_EQ(c.kappa_value(), 1.0 / c.eps);
}

TEST(ParseConfig, KappaDefaultsToInverseEps) {
    const ModelConfig c = parse_config_text("[scheme]\neps = 0.004\n");
    EXPECT_EQ(c.eps, 0.004);
    EXPECT_FALSE(c.kappa.has_value());
    EXPECT_DOUBLE_EQ(c.kappa_value(), 250.0);
    EXPECT_EQ(parse_config_text("[scheme]\nkappa = 77\n").kappa_value(), 77.0);
}

TEST(ParseConfig, ReadsEverySection) {
    const ModelConfig c = parse_config_text(
        "; leading comment\n"
        "[physical]\nmu = 0.1\nR0 = sine(1, 0.1)\n"
        "# another comment\n"
        "[scheme]\nN1 = 24\ncoupling = staggered\n"
        "[admissibility]\nalpha = 0.3\nK = 5\n"
        "[pressure]\np_in = pulse(0.2, 0.05, 0.5)\np_out = constant(0.1)\np_w = -0.05\n"
        "[output]\ndir = results\nvtk = true\nvtk_every = 3\n");
    EXPECT_EQ(c.mu, 0.1);
    EXPECT_EQ(c.r0.kind, "sine");
    EXPECT_EQ(c.r0.amp, 0.1);
    EXPECT_EQ(c.N1, 24);
    EXPECT_EQ(c.coupling, CouplingMode::staggered);
    EXPECT_EQ(*c.alpha, 0.3);
    EXPECT_EQ(c.K, 5.0);
    EXPECT_EQ(c.p_in, PressureSpec::pulse(0.2, 0.05, 0.5));
    EXPECT_EQ(c.p_out, PressureSpec::constant(0.1));
    EXPECT_EQ(c.p_w, PressureSpec::constant(-0.05));
    EXPECT_EQ(c.output_dir, "results");
    EXPECT_TRUE(c.vtk);
    EXPECT_EQ(c.vtk_every, 3);
}

TEST(ParseConfig, NegativeStiffnessNamesTheField) {
    EXPECT_NE(message_of("[physical]\na = -1\n").find("a must be positive"), std::string::npos);
    EXPECT_NE(message_of("[scheme]\ndt = 0\n").find("dt must be positive"), std::string::npos);
}

TEST(ParseConfig, UnknownKeyIsNamed) {
    const std::string m = message_of("[physical]\nvicosity = 0.1\n");
    EXPECT_NE(m.find("vicosity"), std::string::npos) << m;
    EXPECT_NE(message_of("[solver]\nx = 1\n").find("unknown section [solver]"), std::string::npos);
    EXPECT_NE(message_of("mu = 1\n").find("outside any section"), std::string::npos);
}

TEST(ParseConfig, SyntaxErrorCarriesLineNumber) {
    const std::string m = message_of("[physical]\nmu = 0.1\nthis line has no equals sign\n");
    EXPECT_NE(m.find("line 3"), std::string::npos) << m;
    EXPECT_NE(message_of("[physical]\nmu = 0.1\nmu = 0.2\n").find("line 3"), std::string::npos);
}

TEST(ParseConfig, MalformedValuesAreRejected) {
    EXPECT_NE(message_of("[physical]\nmu = fast\n").find("[physical] mu"), std::string::npos);
    EXPECT_NE(message_of("[scheme]\nN1 = 3.5\n").find("integer"), std::string::npos);
    EXPECT_NE(message_of("[pressure]\np_in = ramp(1)\n").find("kind"), std::string::npos);
    EXPECT_NE(message_of("[pressure]\np_in = pulse(1, 2)\n").find("3 argument"), std::string::npos);
    EXPECT_NE(message_of("[output]\nvtk = maybe\n").find("true or false"), std::string::npos);
}

TEST(ParseConfig, PressureTableRelativeToConfigFile) {
    const auto dir = scratch("table");
    {
        std::ofstream(dir / "inflow.txt") << "# t value\n0 0\n0.1 0.2\n\n0.2 0\n";
        std::ofstream(dir / "run.ini") << "[pressure]\np_in = table(inflow.txt)\n";
    }
    const ModelConfig c = parse_config(dir / "run.ini");
    ASSERT_EQ(c.p_in.kind, PressureSpec::Kind::table);
    ASSERT_EQ(c.p_in.samples.size(), 3u);
    EXPECT_DOUBLE_EQ(c.p_in(0.05), 0.1);
    EXPECT_DOUBLE_EQ(c.p_in(0.1), 0.2);
    EXPECT_TRUE(std::filesystem::path(c.p_in.file).is_absolute());

    std::ofstream(dir / "bad.txt") << "0 0\n0.1\n";
    try {
        parse_config_text("[pressure]\np_in = table(bad.txt)\n", dir);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("bad.txt:2"), std::string::npos) << e.what();
    }
}

TEST(ParseConfig, MissingFileIsConfigError) {
    EXPECT_THROW(parse_config("/nonexistent/fsi.ini"), ConfigError);
}

// parse(write(parse(x))) == parse(x) on a spread of configurations
TEST(ParseConfig, WriteParseRoundTripIsIdempotent) {
    const auto dir = scratch("roundtrip");
    std::ofstream(dir / "p.txt") << "0 1\n1 3\n";
    const std::vector<std::string> texts = {
        "",
        "[physical]\nmu = 0.1234567890123\nR0 = bump(1.2, 0.05)\n[scheme]\nkappa = 3e4\n",
        "[scheme]\ndt = 0.003\nT = 0.09\n[admissibility]\nalpha = 0.1\n[pressure]\np_in = table(p.txt)\n",
        "[pressure]\np_in = 0.1\np_w = pulse(1e-3, 0.02, 0.05)\n[output]\nvtk = on\ndir = a b\n",
    };
    for (const auto& t : texts) {
        const ModelConfig x = parse_config_text(t, dir);
        const std::string w = write_config(x);
        const ModelConfig y = parse_config_text(w, dir);
        EXPECT_TRUE(same_config(x, y)) << w;
        EXPECT_EQ(write_config(y), w);
    }
}

TEST(FormatDouble, ShortestRoundTrip) {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5, 0.0}) {
        const std::string s = format_double(v);
        EXPECT_EQ(std::stod(s), v) << s;
    }
    EXPECT_EQ(format_double(0.1), "0.1");
}
