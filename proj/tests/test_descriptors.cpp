#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "gibbsnet/descriptors.hpp"
#include "gibbsnet/error.hpp"
#include "support/files.hpp"

using namespace gibbsnet;

namespace {

std::vector<std::string> texts(const std::vector<SmilesToken>& tokens) {
    std::vector<std::string> out;
    for (const auto& t : tokens) out.push_back(t.text);
    return out;
}

std::size_t parse_error_offset(std::string_view smiles) {
    try {
        tokenize_smiles(smiles);
    } catch (const ParseError& e) {
        return e.position();
    }
    FAIL("expected a parse error for " << smiles);
    return 0;
}

}  // namespace

TEST_CASE("tokenizer splits atoms, bonds, rings and branches") {
    CHECK(texts(tokenize_smiles("CCO")) == std::vector<std::string>{"C", "C", "O"});
    CHECK(texts(tokenize_smiles("ClCCl")) == std::vector<std::string>{"Cl", "C", "Cl"});
    CHECK(texts(tokenize_smiles("BrC(=O)c1ccccc1")) ==
          std::vector<std::string>{"Br", "C", "(", "=", "O", ")", "c", "1", "c", "c", "c", "c", "c", "1"});
    CHECK(texts(tokenize_smiles("[13CH3+]C%12CC%12")) ==
          std::vector<std::string>{"[13CH3+]", "C", "%12", "C", "C", "%12"});
    CHECK(texts(tokenize_smiles("[Na+].[Cl-]")) == std::vector<std::string>{"[Na+]", ".", "[Cl-]"});
}

TEST_CASE("token kinds and bracket attributes") {
    const auto t = tokenize_smiles("[13CH3+]c1ccccc1");
    CHECK(t[0].kind == TokenKind::bracket_atom);
    CHECK(t[0].isotope == 13);
    CHECK(t[0].charge == 1);
    CHECK(t[1].kind == TokenKind::atom);
    CHECK(t[1].aromatic);
    CHECK(t[2].kind == TokenKind::ring_closure);
    CHECK(tokenize_smiles("[O--]")[0].charge == -2);
    CHECK(tokenize_smiles("[Fe+3]")[0].charge == 3);
}

TEST_CASE("token concatenation reproduces the input") {
    for (const auto& s : builtin_smiles_corpus(150)) {
        std::string joined;
        for (const auto& tok : tokenize_smiles(s)) {
            CHECK(s.compare(tok.offset, tok.text.size(), tok.text) == 0);
            joined += tok.text;
        }
        CHECK(joined == s);
    }
}

TEST_CASE("tokenizer errors carry byte offsets") {
    CHECK_THROWS_AS(tokenize_smiles("C1=CC=CC=C1("), ParseError);
    CHECK(parse_error_offset("C1=CC=CC=C1(") == 11);
    CHECK(parse_error_offset("CC)C") == 2);
    CHECK(parse_error_offset("C[NH4") == 1);
    CHECK(parse_error_offset("CC?") == 2);
    CHECK(parse_error_offset("CC]") == 2);
    CHECK(parse_error_offset("") == 0);
    CHECK(parse_error_offset("C%1") == 1);
    CHECK(parse_error_offset("C\xc3\xa9") == 1);
}

TEST_CASE("stable hash matches an independent implementation") {
    // Values from a separate Python implementation of FNV-1a + splitmix64.
    CHECK(stable_hash("", 0) == 0xf52a15e9a9b5e89bULL);
    CHECK(stable_hash("CCO", 0) == 0xd7f08736c893ab0fULL);
    CHECK(stable_hash("tok:C", kDefaultFeaturizerSeed) == 0x9616712f1892ab79ULL);
}

TEST_CASE("featurizer is deterministic, normalized and discriminating") {
    const auto a = featurize("CCO", 64);
    const auto b = featurize("CCO", 64);
    CHECK(a.vector == b.vector);
    CHECK(a.vector.size() == 64);
    double n2 = 0.0;
    for (const double v : a.vector) n2 += v * v;
    CHECK(std::abs(std::sqrt(n2) - 1.0) < 1e-12);
    CHECK(featurize("CCO", 64).vector != featurize("CCCO", 64).vector);
    CHECK(featurize("CCO", 384).vector != featurize("CCCO", 384).vector);
    CHECK(featurize("CCO", 64, 1).vector != featurize("CCO", 64, 2).vector);
    CHECK_THROWS_AS(featurize("CCO", 15), DomainError);
    CHECK_THROWS_AS(featurize("C(", 64), ParseError);
}

TEST_CASE("featurizer is injective on the built-in corpus") {
    const auto corpus = builtin_smiles_corpus(120);
    REQUIRE(corpus.size() == 120);
    CHECK(std::set<std::string>(corpus.begin(), corpus.end()).size() == corpus.size());
    for (const std::size_t dim : {64u, 128u, 384u}) {
        std::set<std::vector<double>> seen;
        for (const auto& s : corpus) {
            seen.insert(featurize(s, dim).vector);
        }
        CAPTURE(dim);
        CHECK(seen.size() == corpus.size());
    }
}

TEST_CASE("corpus is deterministic and prefix-stable") {
    const auto a = builtin_smiles_corpus(40);
    const auto b = builtin_smiles_corpus(100);
    CHECK(std::equal(a.begin(), a.end(), b.begin()));
    CHECK_THROWS(builtin_smiles_corpus(100000));
}

TEST_CASE("descriptor table parsing") {
    const auto t = parse_descriptor_table("smiles,dim=4,source=test,seed=7\nCCO,1,2,3,4\nO,0,0,0,1e-3\n");
    CHECK(t.dim == 4);
    CHECK(t.source == "test");
    CHECK(t.seed == 7);
    CHECK(t.entries.size() == 2);
    CHECK(t.at("O")[3] == 1e-3);
    CHECK(t.order() == std::vector<std::string>{"CCO", "O"});
    CHECK(t.find("N") == nullptr);

    CHECK(parse_descriptor_table("smiles,dim=4,source=test,seed=7\n").entries.empty());

    auto line_of = [](std::string_view text) -> std::size_t {
        try {
            parse_descriptor_table(text);
        } catch (const ParseError& e) {
            return e.position();
        }
        return 0;
    };
    CHECK(line_of("smiles,dim=4,source=test,seed=7\nCCO,1,2,3,4\nO,1,2,3\n") == 3);
    CHECK(line_of("smiles,dim=4,source=test,seed=7\nCCO,1,2,3,4\nCCO,1,2,3,4\n") == 3);
    CHECK(line_of("smiles,dim=4,source=test,seed=7\nCCO,1,2,x,4\n") == 2);
    CHECK(line_of("smiles,dim=4,source=test,seed=7\nCCO,1,2,nan,4\n") == 2);
    CHECK(line_of("smiles,dim=4\nCCO,1,2,3,4\n") == 1);
    CHECK(line_of("smiles,dim=0,source=x,seed=1\n") == 1);
}

TEST_CASE("descriptor table round trip through a file") {
    const auto table = featurize_all(builtin_smiles_corpus(12), 32);
    support::TempDir dir;
    const auto path = dir.path() / "d.csv";
    write_descriptor_table(table, path);
    const auto back = load_descriptor_table(path);
    CHECK(back.dim == table.dim);
    CHECK(back.source == "featurizer");
    CHECK(back.seed == table.seed);
    CHECK(back.order() == table.order());
    for (const auto& s : table.order()) {
        const auto& a = table.at(s);
        const auto& b = back.at(s);
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(std::abs(a[i] - b[i]) <= 1e-12);
        }
    }
    CHECK_THROWS_AS(load_descriptor_table(dir.path() / "missing.csv"), IoError);
}

TEST_CASE("language-model embedding files load through the descriptor contract") {
    // Layout written by the external embedding exporter: 384 values per row,
    // rows in input order, the model variant as the source tag.
    const std::vector<std::string> smiles{"CCO", "O", "CC(C)=O", "c1ccccc1", "CO",
                                          "CCCCCC", "ClC(Cl)Cl", "CC#N", "OCCO", "CCOC(C)=O"};
    std::string text = "smiles,dim=384,source=ChemBERTa-77M-MTR,seed=0\n";
    for (std::size_t r = 0; r < smiles.size(); ++r) {
        text += smiles[r];
        for (std::size_t i = 0; i < 384; ++i) text += "," + std::to_string(std::sin(0.01 * (r * 384.0 + i)));
        text += "\n";
    }
    const auto t = parse_descriptor_table(text);
    CHECK(t.dim == 384);
    CHECK(t.source == "ChemBERTa-77M-MTR");
    CHECK(t.order() == smiles);
    for (const auto& s : smiles) CHECK(t.at(s).size() == 384);
    CHECK(parse_descriptor_table(format_descriptor_table(t)).order() == smiles);
}

TEST_CASE("table insertion validates shape, finiteness and duplicates") {
    DescriptorTable t;
    t.dim = 2;
    t.insert("A", {1, 2});
    CHECK_THROWS_AS(t.insert("B", {1}), ShapeError);
    CHECK_THROWS(t.insert("A", {1, 2}));
    CHECK_THROWS(t.insert("C", {1, std::nan("")}));
    CHECK_THROWS(featurize_all({"CCO", "CCO"}, 32));
}
