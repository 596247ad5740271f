#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "logprose/extract.hpp"

namespace logprose {

inline constexpr std::string_view kPlaceholderToken = "<PH>";
inline constexpr std::string_view kUnknownToken = "<UNK>";

std::string level_token(Level level);

struct TokenSequence {
    std::vector<std::string> tokens;  // message tokens, then one level token
};

struct TokenizeOptions {
    bool strip_punctuation = true;
    PlaceholderStyle style = PlaceholderStyle::braces;
};

TokenSequence tokenize(std::string_view message, Level level, const TokenizeOptions& options = {});

class Vocabulary {
public:
    // Index order: <PH>, <UNK>, the six level tokens, then kept tokens by
    // descending count and ascending spelling. Throws EmptyCorpus.
    static Vocabulary build(const std::vector<TokenSequence>& corpus, std::size_t min_count = 1);
    static Vocabulary from_tokens(std::vector<std::string> tokens, std::vector<std::uint64_t> counts);

    std::size_t size() const { return tokens_.size(); }
    std::size_t index_of(std::string_view token) const;  // <UNK> when absent
    bool contains(std::string_view token) const;
    const std::string& token(std::size_t index) const { return tokens_[index]; }
    std::uint64_t count(std::size_t index) const { return counts_[index]; }
    const std::vector<std::string>& tokens() const { return tokens_; }
    const std::vector<std::uint64_t>& counts() const { return counts_; }
    std::size_t unk_index() const { return 1; }

    std::vector<std::size_t> encode(const TokenSequence& seq) const;

private:
    std::vector<std::string> tokens_;
    std::vector<std::uint64_t> counts_;
    std::unordered_map<std::string, std::size_t> index_;
};

struct SkipGramParams {
    std::size_t dimension = 100;
    std::size_t window = 5;
    std::size_t negatives = 5;
    std::size_t epochs = 15;
    double learning_rate = 0.025;  // decays linearly to lr * 1e-4
    std::size_t min_count = 1;
    std::uint64_t seed = 1;
    double clip = 5.0;
};

nlohmann::ordered_json to_json(const SkipGramParams& hp);
SkipGramParams skipgram_params_from_json(const nlohmann::json& j);

// Row-major |V| x d matrix.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
    std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
};

struct EmbeddingTable {
    SkipGramParams params;
    Vocabulary vocabulary;
    Matrix input;
    Matrix output;
    std::vector<double> epoch_loss;  // mean loss per training pair, per epoch
    std::uint64_t training_pairs = 0;  // (center, context) pairs per epoch

    std::size_t dimension() const { return input.cols; }
    std::span<const double> vector_of(std::string_view token) const {
        return input.row(vocabulary.index_of(token));
    }
    // Input plus output vector when output vectors are loaded, else input only.
    std::vector<double> word_vector(std::string_view token) const;
};

double cosine(std::span<const double> a, std::span<const double> b);

// Seeded initialization only (what epochs = 0 returns).
EmbeddingTable init_embeddings(Vocabulary vocabulary, const SkipGramParams& hp);

// Skip-gram with negative sampling over the unigram^0.75 distribution.
// Throws EmptyCorpus.
EmbeddingTable train_skipgram(const std::vector<TokenSequence>& corpus, const SkipGramParams& hp);

// Mean of input vectors; out-of-vocabulary tokens use <UNK>; an empty
// sequence gives the zero vector.
std::vector<double> vectorize(const TokenSequence& seq, const EmbeddingTable& emb);

// Versioned JSON; output vectors are included only when asked.
nlohmann::ordered_json to_json(const EmbeddingTable& emb, bool include_output = false);
EmbeddingTable embedding_from_json(const nlohmann::json& j);

// SHA-256 hex digest of the table's canonical JSON form.
std::string content_hash(const EmbeddingTable& emb);

} // namespace logprose
