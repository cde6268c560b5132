#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lsek/catalog.hpp"
#include "lsek/thermo.hpp"
#include "lsek/tudataset.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace lsek;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

Run lsek_run(const std::string& args, const fs::path& dir) {
    const auto out = dir / "stdout.txt", err = dir / "stderr.txt";
    const std::string cmd = std::string(LSEK_CLI_PATH) + " " + args + " >" + out.string() + " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

std::vector<std::vector<std::string>> csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream cs(line);
        std::string cell;
        while (std::getline(cs, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

const std::string mutag = lsek::testing::mutag_dir().string();

}  // namespace

TEST(Cli, HelpAndUsage) {
    auto dir = lsek::testing::scratch_dir("cli_help");
    EXPECT_EQ(lsek_run("--help", dir).code, 0);
    for (const char* sub : {"catalog", "census", "embed", "gram", "kpca", "classify", "finnet"}) {
        auto r = lsek_run(std::string(sub) + " --help", dir);
        EXPECT_EQ(r.code, 0) << sub;
    }
    EXPECT_NE(lsek_run("finnet --help", dir).out.find("--quantile"), std::string::npos);
    EXPECT_EQ(lsek_run("", dir).code, 2);
    EXPECT_EQ(lsek_run("census " + mutag + " --bogus", dir).code, 2);
    EXPECT_EQ(lsek_run("embed " + mutag + " --mode exact", dir).code, 2);
}

TEST(Cli, Catalog) {
    auto dir = lsek::testing::scratch_dir("cli_catalog");
    auto r = lsek_run("catalog", dir);
    ASSERT_EQ(r.code, 0);
    auto rows = csv(r.out);
    ASSERT_EQ(rows.size(), 13u);
    EXPECT_EQ(rows[1][1], "triangle");
    EXPECT_EQ(rows[12][0], "12");
}

TEST(Cli, CensusOfMutag) {
    auto dir = lsek::testing::scratch_dir("cli_census");
    auto r = lsek_run("census " + mutag + " -o " + (dir / "c.csv").string(), dir);
    ASSERT_EQ(r.code, 0) << r.err;
    auto rows = csv(slurp(dir / "c.csv"));
    EXPECT_EQ(rows[0], (std::vector<std::string>{"graph_id", "type_id", "label", "count"}));
    EXPECT_EQ(rows.size(), 1u + 188u * 12u * 7u);
    std::set<std::string> ids;
    for (std::size_t i = 1; i < rows.size(); ++i) ids.insert(rows[i][0]);
    EXPECT_EQ(ids.size(), 188u);
    auto echo = nlohmann::json::parse(slurp(dir / "c.csv.run.json"));
    EXPECT_EQ(echo["subcommand"], "census");
    EXPECT_EQ(echo["topologies"], "1,2,3,4,5,6,7,8,9,10,11,12");
}

TEST(Cli, CensusOfEmptyGraph) {
    auto dir = lsek::testing::scratch_dir("cli_empty");
    auto ds = make_dataset({make_graph(3, {}, 0, "1"), make_graph(3, {{0, 1}, {1, 2}}, 0, "2")}, {1, -1}, "TINY");
    write_tudataset(ds, dir / "TINY");
    auto r = lsek_run("census " + (dir / "TINY").string() + " --topologies small", dir);
    ASSERT_EQ(r.code, 0) << r.err;
    auto rows = csv(r.out);
    ASSERT_EQ(rows.size(), 1u + 2u * 8u);
    for (std::size_t i = 1; i <= 8; ++i) EXPECT_EQ(rows[i][3], "0");
    EXPECT_EQ(rows[10][3], "2");  // graph 2, path-3 rooted at both ends
}

TEST(Cli, MissingDirectory) {
    auto dir = lsek::testing::scratch_dir("cli_missing");
    auto r = lsek_run("census /no/such/dataset", dir);
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("/no/such/dataset"), std::string::npos);
    EXPECT_EQ(lsek_run("finnet /no/such/prices.csv", dir).code, 2);
}

TEST(Cli, EmbedShapeAndErrors) {
    auto dir = lsek::testing::scratch_dir("cli_embed");
    auto r = lsek_run("embed " + mutag + " -o " + (dir / "e.csv").string(), dir);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.err.find("epsilon=17.18281828459045"), std::string::npos);
    auto rows = csv(slurp(dir / "e.csv"));
    ASSERT_EQ(rows.size(), 189u);
    for (const auto& row : rows) EXPECT_EQ(row.size(), 85u);
    EXPECT_EQ(rows[0][1], "S_v1_l0");

    auto bad = lsek_run("embed " + mutag + " --prefactor 1", dir);
    EXPECT_EQ(bad.code, 1);
    EXPECT_NE(bad.err.find("edge integral nonpositive"), std::string::npos);
    EXPECT_EQ(lsek_run("embed " + mutag + " --beta -1", dir).code, 2);
}

TEST(Cli, MayerModeOnlyChangesEpsilon) {
    auto dir = lsek::testing::scratch_dir("cli_mayer");
    ASSERT_EQ(lsek_run("census " + mutag + " -o " + (dir / "c.csv").string(), dir).code, 0);
    ASSERT_EQ(lsek_run("embed " + mutag + " -o " + (dir / "closed.csv").string(), dir).code, 0);
    ASSERT_EQ(lsek_run("embed " + mutag + " --mode mayer -o " + (dir / "mayer.csv").string(), dir).code, 0);
    std::map<std::pair<std::string, std::string>, double> counts;
    for (const auto& row : csv(slurp(dir / "c.csv")))
        if (row[0] != "graph_id") counts[{row[0], "S_v" + row[1] + "_l" + row[2]}] = std::stod(row[3]);
    const ThermoParams p;
    // independent recomputation of S from the census and each edge integral
    auto entropy = [&](double n, int type_id, double eps) {
        if (n == 0) return 0.0;
        const auto& t = topology(type_id);
        const double d = static_cast<double>(t.edge_count()), l = static_cast<double>(t.nodes);
        return n * (d * (std::log(eps) - p.beta * (eps - p.radial_offset()) / eps) - l * std::log(l) - std::log(n));
    };
    for (auto [file, eps] : {std::pair{"closed.csv", 10.0 * std::exp(1.0) - 10.0},
                             std::pair{"mayer.csv", 17847333.903939485}}) {
        auto rows = csv(slurp(dir / file));
        std::size_t checked = 0;
        for (std::size_t r = 1; r < rows.size(); r += 17) {
            for (std::size_t c = 1; c < rows[0].size(); ++c) {
                const int type_id = std::stoi(rows[0][c].substr(3));
                const double expected = entropy(counts.at({rows[r][0], rows[0][c]}), type_id, eps);
                EXPECT_NEAR(std::stod(rows[r][c]), expected, 1e-9 * std::max(1.0, std::abs(expected))) << file;
                ++checked;
            }
        }
        EXPECT_GT(checked, 500u);
    }
}

TEST(Cli, GramFormatsAndKpca) {
    auto dir = lsek::testing::scratch_dir("cli_gram");
    ASSERT_EQ(lsek_run("gram " + mutag + " --standardize -o " + (dir / "g.csv").string(), dir).code, 0);
    auto rows = csv(slurp(dir / "g.csv"));
    ASSERT_EQ(rows.size(), 189u);
    EXPECT_EQ(rows[0].size(), 189u);
    EXPECT_EQ(rows[3][7], rows[7][3]);

    ASSERT_EQ(lsek_run("gram " + mutag + " --kernel rbf --format json -o " + (dir / "g.json").string(), dir).code, 0);
    auto j = nlohmann::json::parse(slurp(dir / "g.json"));
    EXPECT_EQ(j["values"].size(), 188u);
    EXPECT_EQ(j["values"][5][5].get<double>(), 1.0);
    EXPECT_EQ(j["kernel"]["kind"], "rbf");
    EXPECT_DOUBLE_EQ(j["kernel"]["gamma"].get<double>(), 1.0 / 84.0);

    auto r = lsek_run("kpca " + mutag + " --standardize --components 3", dir);
    ASSERT_EQ(r.code, 0) << r.err;
    auto k = csv(r.out);
    ASSERT_EQ(k.size(), 189u);
    EXPECT_EQ(k[0], (std::vector<std::string>{"graph_id", "class", "pc1", "pc2", "pc3"}));
    EXPECT_EQ(lsek_run("kpca " + mutag + " --components 200", dir).code, 1);
}

TEST(Cli, ClassifyFromDatasetAndFromGramFile) {
    auto dir = lsek::testing::scratch_dir("cli_classify");
    auto direct = lsek_run("classify " + mutag + " --standardize --kernel linear --folds 10 --seed 42", dir);
    ASSERT_EQ(direct.code, 0) << direct.err;
    auto report = nlohmann::json::parse(direct.out);
    EXPECT_GE(report["mean_accuracy"].get<double>(), 0.80);
    EXPECT_EQ(report["reports"][0]["fold_accuracies"].size(), 10u);

    ASSERT_EQ(lsek_run("gram " + mutag + " --standardize --format libsvm -o " + (dir / "g.txt").string(), dir).code, 0);
    auto from_file = lsek_run("classify --gram " + (dir / "g.txt").string(), dir);
    ASSERT_EQ(from_file.code, 0) << from_file.err;
    auto second = nlohmann::json::parse(from_file.out);
    EXPECT_EQ(second["reports"][0]["fold_accuracies"], report["reports"][0]["fold_accuracies"]);

    auto table = lsek_run("classify --gram " + (dir / "g.txt").string() + " --repeats 2 --format table", dir);
    ASSERT_EQ(table.code, 0);
    EXPECT_EQ(csv(table.out).size(), 3u);

    auto raw = lsek_run("classify " + mutag, dir);
    EXPECT_EQ(raw.code, 1);
    EXPECT_NE(raw.err.find("no convergence"), std::string::npos);
}

TEST(Cli, ConfigFileMergesUnderFlags) {
    auto dir = lsek::testing::scratch_dir("cli_config");
    lsek::testing::write_text(dir / "cfg.json", R"({"beta": 2.0, "topologies": "include=1,2"})");
    auto r = lsek_run("embed " + mutag + " --config " + (dir / "cfg.json").string() + " --beta 1.5 -o " +
                          (dir / "e.csv").string(),
                      dir);
    ASSERT_EQ(r.code, 0) << r.err;
    auto echo = nlohmann::json::parse(slurp(dir / "e.csv.run.json"));
    EXPECT_EQ(echo["thermo"]["beta"].get<double>(), 1.5);
    EXPECT_EQ(echo["topologies"], "1,2");

    lsek::testing::write_text(dir / "cfg.txt", "# comment\nbeta = 2\nprefactor=12\n");
    ASSERT_EQ(lsek_run("embed " + mutag + " --config " + (dir / "cfg.txt").string() + " -o " + (dir / "f.csv").string(), dir).code, 0);
    echo = nlohmann::json::parse(slurp(dir / "f.csv.run.json"));
    EXPECT_EQ(echo["thermo"]["beta"].get<double>(), 2.0);
    EXPECT_EQ(echo["thermo"]["prefactor"].get<double>(), 12.0);

    lsek::testing::write_text(dir / "cfg2.json", R"({"C": [0.5, 5], "standardize": true})");
    // C only exists on classify
    EXPECT_EQ(lsek_run("embed " + mutag + " --config " + (dir / "cfg2.json").string(), dir).code, 2);
    auto c = lsek_run("classify " + mutag + " --config " + (dir / "cfg2.json").string() + " --format json", dir);
    ASSERT_EQ(c.code, 0) << c.err;
    EXPECT_EQ(nlohmann::json::parse(c.out)["C_grid"], nlohmann::json::parse("[0.5, 5.0]"));
    EXPECT_EQ(lsek_run("embed " + mutag + " --config " + (dir / "none.json").string(), dir).code, 2);
}

TEST(Cli, FinnetSeries) {
    auto dir = lsek::testing::scratch_dir("cli_finnet");
    lsek::testing::RegimePanel spec;
    spec.tickers = 12;
    spec.days = 60;
    spec.switch_day = 30;
    spec.block = 6;
    lsek::testing::write_text(dir / "p.csv", lsek::testing::to_csv(lsek::testing::regime_switch_prices(spec, 3)));
    auto r = lsek_run("finnet " + (dir / "p.csv").string() + " --window 28 --quantile 0.05 --aggregate -o " +
                          (dir / "s.csv").string(),
                      dir);
    ASSERT_EQ(r.code, 0) << r.err;
    auto rows = csv(slurp(dir / "s.csv"));
    EXPECT_EQ(rows[0], (std::vector<std::string>{"window_end_date", "topology", "subgraph_entropy",
                                                  "von_neumann_entropy", "flagged"}));
    EXPECT_EQ(rows.size(), 1u + 33u * 9u);  // 33 windows x (8 topologies + all)
    EXPECT_EQ(rows[1][0], "day0027");
    EXPECT_EQ(rows[9][1], "all");
    auto preceding = lsek_run("finnet " + (dir / "p.csv").string() + " --alignment preceding --topologies include=2", dir);
    ASSERT_EQ(preceding.code, 0);
    EXPECT_EQ(csv(preceding.out).size(), 1u + 32u);
}

TEST(Cli, ByteIdenticalReruns) {
    auto dir = lsek::testing::scratch_dir("cli_determinism");
    for (const std::string sub : {"census", "embed", "gram"}) {
        ASSERT_EQ(lsek_run(sub + " " + mutag + " -o " + (dir / (sub + "1.out")).string(), dir).code, 0);
        ASSERT_EQ(lsek_run(sub + " " + mutag + " -j 1 -o " + (dir / (sub + "2.out")).string(), dir).code, 0);
        EXPECT_EQ(slurp(dir / (sub + "1.out")), slurp(dir / (sub + "2.out"))) << sub;
    }
}
