#include "logprose/features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "logprose/digest.hpp"
#include "logprose/errors.hpp"
#include "logprose/random.hpp"

namespace logprose {

namespace {

constexpr int kEmbeddingFormatVersion = 1;

bool is_edge_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

std::string fold(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

void push_piece(std::vector<std::string>& out, std::string_view piece, bool strip) {
    if (strip) {
        while (!piece.empty() && is_edge_punct(piece.front())) piece.remove_prefix(1);
        while (!piece.empty() && is_edge_punct(piece.back())) piece.remove_suffix(1);
    }
    if (!piece.empty()) out.push_back(fold(piece));
}

double sigmoid(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// -log(sigmoid(x)) without overflow.
double softplus_neg(double x) { return x > 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x)); }

double clip(double g, double limit) { return std::clamp(g, -limit, limit); }

} // namespace

std::string level_token(Level level) {
    std::string name(to_string(level));
    for (auto& c : name) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return "<LV_" + name + ">";
}

TokenSequence tokenize(std::string_view message, Level level, const TokenizeOptions& options) {
    TokenSequence seq;
    std::size_t i = 0;
    while (i < message.size()) {
        while (i < message.size() && std::isspace(static_cast<unsigned char>(message[i]))) ++i;
        if (i >= message.size()) break;
        const auto start = i;
        while (i < message.size() && !std::isspace(static_cast<unsigned char>(message[i]))) ++i;
        const auto word = message.substr(start, i - start);

        // Marker spans: template placeholders plus already-normalized <PH>.
        auto spans = find_placeholders(word, options.style);
        for (auto at = word.find(kPlaceholderToken); at != std::string_view::npos;
             at = word.find(kPlaceholderToken, at + kPlaceholderToken.size())) {
            spans.emplace_back(at, kPlaceholderToken.size());
        }
        std::sort(spans.begin(), spans.end());

        std::size_t cursor = 0;
        for (const auto& [offset, length] : spans) {
            if (offset < cursor) continue;
            push_piece(seq.tokens, word.substr(cursor, offset - cursor), options.strip_punctuation);
            seq.tokens.emplace_back(kPlaceholderToken);
            cursor = offset + length;
        }
        push_piece(seq.tokens, word.substr(cursor), options.strip_punctuation);
    }
    seq.tokens.push_back(level_token(level));
    return seq;
}

Vocabulary Vocabulary::build(const std::vector<TokenSequence>& corpus, std::size_t min_count) {
    if (corpus.empty()) throw EmptyCorpus("cannot build a vocabulary from an empty corpus");
    min_count = std::max<std::size_t>(min_count, 1);

    std::map<std::string, std::uint64_t> counts;
    for (const auto& seq : corpus) {
        for (const auto& t : seq.tokens) ++counts[t];
    }

    std::vector<std::string> specials = {std::string(kPlaceholderToken), std::string(kUnknownToken)};
    for (auto level : kAllLevels) specials.push_back(level_token(level));

    std::vector<std::string> tokens = specials;
    std::vector<std::uint64_t> token_counts;
    for (const auto& s : specials) {
        auto it = counts.find(s);
        token_counts.push_back(it == counts.end() ? 0 : it->second);
        if (it != counts.end()) counts.erase(it);
    }

    std::vector<std::pair<std::string, std::uint64_t>> kept;
    for (auto& [token, n] : counts) {
        if (n >= min_count) {
            kept.emplace_back(token, n);
        } else {
            token_counts[1] += n;
        }
    }
    std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    for (auto& [token, n] : kept) {
        tokens.push_back(std::move(token));
        token_counts.push_back(n);
    }
    return from_tokens(std::move(tokens), std::move(token_counts));
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens, std::vector<std::uint64_t> counts) {
    if (tokens.size() != counts.size()) throw ModelFormatError("vocabulary tokens and counts differ in length");
    if (tokens.size() < 2 || tokens[0] != kPlaceholderToken || tokens[1] != kUnknownToken) {
        throw ModelFormatError("vocabulary must start with <PH>, <UNK>");
    }
    Vocabulary v;
    v.tokens_ = std::move(tokens);
    v.counts_ = std::move(counts);
    for (std::size_t i = 0; i < v.tokens_.size(); ++i) {
        if (!v.index_.emplace(v.tokens_[i], i).second) {
            throw ModelFormatError("duplicate vocabulary token '" + v.tokens_[i] + "'");
        }
    }
    return v;
}

std::size_t Vocabulary::index_of(std::string_view token) const {
    auto it = index_.find(std::string(token));
    return it == index_.end() ? unk_index() : it->second;
}

bool Vocabulary::contains(std::string_view token) const { return index_.contains(std::string(token)); }

std::vector<std::size_t> Vocabulary::encode(const TokenSequence& seq) const {
    std::vector<std::size_t> ids;
    ids.reserve(seq.tokens.size());
    for (const auto& t : seq.tokens) ids.push_back(index_of(t));
    return ids;
}

nlohmann::ordered_json to_json(const SkipGramParams& hp) {
    nlohmann::ordered_json j;
    j["dimension"] = hp.dimension;
    j["window"] = hp.window;
    j["negatives"] = hp.negatives;
    j["epochs"] = hp.epochs;
    j["learning_rate"] = hp.learning_rate;
    j["min_count"] = hp.min_count;
    j["seed"] = hp.seed;
    j["clip"] = hp.clip;
    return j;
}

SkipGramParams skipgram_params_from_json(const nlohmann::json& j) {
    SkipGramParams hp;
    for (const auto& [key, value] : j.items()) {
        if (key == "dimension") hp.dimension = value.get<std::size_t>();
        else if (key == "window") hp.window = value.get<std::size_t>();
        else if (key == "negatives") hp.negatives = value.get<std::size_t>();
        else if (key == "epochs") hp.epochs = value.get<std::size_t>();
        else if (key == "learning_rate") hp.learning_rate = value.get<double>();
        else if (key == "min_count") hp.min_count = value.get<std::size_t>();
        else if (key == "seed") hp.seed = value.get<std::uint64_t>();
        else if (key == "clip") hp.clip = value.get<double>();
        else throw ConfigError("unknown embedding parameter '" + key + "'");
    }
    if (hp.dimension == 0) throw ConfigError("embedding dimension must be positive");
    if (hp.window == 0) throw ConfigError("embedding window must be positive");
    if (!(hp.learning_rate > 0)) throw ConfigError("embedding learning_rate must be positive");
    if (hp.min_count == 0) throw ConfigError("embedding min_count must be at least 1");
    if (!(hp.clip > 0)) throw ConfigError("embedding clip must be positive");
    return hp;
}

double cosine(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DimensionMismatch("cosine of vectors with different lengths");
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0 || nb == 0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

EmbeddingTable init_embeddings(Vocabulary vocabulary, const SkipGramParams& hp) {
    if (hp.dimension == 0) throw ConfigError("embedding dimension must be positive");
    EmbeddingTable emb;
    emb.params = hp;
    const auto rows = vocabulary.size();
    emb.vocabulary = std::move(vocabulary);
    emb.input = Matrix{rows, hp.dimension, std::vector<double>(rows * hp.dimension)};
    emb.output = Matrix{rows, hp.dimension, std::vector<double>(rows * hp.dimension, 0.0)};
    Rng rng(derive_seed(hp.seed, "skipgram.init"));
    const double scale = 1.0 / static_cast<double>(hp.dimension);
    for (auto& x : emb.input.data) x = (rng.uniform() - 0.5) * scale;
    return emb;
}

EmbeddingTable train_skipgram(const std::vector<TokenSequence>& corpus, const SkipGramParams& hp) {
    auto emb = init_embeddings(Vocabulary::build(corpus, hp.min_count), hp);
    const auto& vocab = emb.vocabulary;
    const auto d = hp.dimension;

    std::vector<std::vector<std::size_t>> encoded;
    encoded.reserve(corpus.size());
    std::uint64_t pairs = 0;
    for (const auto& seq : corpus) {
        encoded.push_back(vocab.encode(seq));
        const auto n = encoded.back().size();
        for (std::size_t i = 0; i < n; ++i) {
            const auto lo = i >= hp.window ? i - hp.window : 0;
            const auto hi = std::min(n - 1, i + hp.window);
            pairs += hi - lo;
        }
    }
    emb.training_pairs = pairs;
    if (hp.epochs == 0) return emb;
    if (pairs == 0) {
        emb.epoch_loss.assign(hp.epochs, 0.0);
        return emb;
    }

    // Cumulative unigram^0.75 distribution for negative draws.
    std::vector<double> cumulative(vocab.size());
    double total = 0;
    for (std::size_t i = 0; i < vocab.size(); ++i) {
        total += std::pow(static_cast<double>(vocab.count(i)), 0.75);
        cumulative[i] = total;
    }

    Rng rng(derive_seed(hp.seed, "skipgram.train"));
    auto draw_negative = [&] {
        const double u = rng.uniform() * total;
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        return static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cumulative.begin(),
                                                                 static_cast<std::ptrdiff_t>(vocab.size() - 1)));
    };

    const double total_updates = static_cast<double>(pairs) * static_cast<double>(hp.epochs);
    double done = 0;
    std::vector<double> grad_in(d);

    // One logistic step on (center input, target output); returns the loss.
    auto step = [&](std::span<double> in, std::size_t target, double label, double lr) {
        auto out = emb.output.row(target);
        double dot = 0;
        for (std::size_t k = 0; k < d; ++k) dot += in[k] * out[k];
        const double g = (label - sigmoid(dot)) * lr;
        for (std::size_t k = 0; k < d; ++k) {
            grad_in[k] += clip(g * out[k], hp.clip);
            out[k] += clip(g * in[k], hp.clip);
        }
        return label > 0.5 ? softplus_neg(dot) : softplus_neg(-dot);
    };

    for (std::size_t epoch = 0; epoch < hp.epochs; ++epoch) {
        double loss = 0;
        for (const auto& ids : encoded) {
            const auto n = ids.size();
            for (std::size_t i = 0; i < n; ++i) {
                const auto lo = i >= hp.window ? i - hp.window : 0;
                const auto hi = std::min(n - 1, i + hp.window);
                for (std::size_t j = lo; j <= hi; ++j) {
                    if (j == i) continue;
                    const double lr = hp.learning_rate * std::max(1e-4, 1.0 - done / total_updates);
                    done += 1;
                    auto in = emb.input.row(ids[i]);
                    std::fill(grad_in.begin(), grad_in.end(), 0.0);
                    loss += step(in, ids[j], 1.0, lr);
                    for (std::size_t s = 0; s < hp.negatives; ++s) {
                        const auto neg = draw_negative();
                        if (neg == ids[j]) continue;
                        loss += step(in, neg, 0.0, lr);
                    }
                    for (std::size_t k = 0; k < d; ++k) in[k] += clip(grad_in[k], hp.clip);
                }
            }
        }
        emb.epoch_loss.push_back(loss / static_cast<double>(pairs));
    }
    return emb;
}

std::vector<double> EmbeddingTable::word_vector(std::string_view token) const {
    const auto idx = vocabulary.index_of(token);
    const auto in = input.row(idx);
    std::vector<double> v(in.begin(), in.end());
    if (output.rows == input.rows && output.cols == input.cols) {
        const auto out = output.row(idx);
        for (std::size_t k = 0; k < v.size(); ++k) v[k] += out[k];
    }
    return v;
}

std::vector<double> vectorize(const TokenSequence& seq, const EmbeddingTable& emb) {
    std::vector<double> v(emb.dimension(), 0.0);
    if (seq.tokens.empty()) return v;
    for (const auto& t : seq.tokens) {
        const auto row = emb.input.row(emb.vocabulary.index_of(t));
        for (std::size_t k = 0; k < v.size(); ++k) v[k] += row[k];
    }
    const double n = static_cast<double>(seq.tokens.size());
    for (auto& x : v) x /= n;
    return v;
}

nlohmann::ordered_json to_json(const EmbeddingTable& emb, bool include_output) {
    auto matrix = [](const Matrix& m) {
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (std::size_t r = 0; r < m.rows; ++r) {
            const auto row = m.row(r);
            rows.push_back(std::vector<double>(row.begin(), row.end()));
        }
        return rows;
    };
    nlohmann::ordered_json j;
    j["version"] = kEmbeddingFormatVersion;
    j["d"] = emb.dimension();
    j["hp"] = to_json(emb.params);
    j["tokens"] = emb.vocabulary.tokens();
    j["counts"] = emb.vocabulary.counts();
    j["training_pairs"] = emb.training_pairs;
    j["epoch_loss"] = emb.epoch_loss;
    j["input"] = matrix(emb.input);
    if (include_output) j["output"] = matrix(emb.output);
    return j;
}

EmbeddingTable embedding_from_json(const nlohmann::json& j) {
    try {
        if (j.at("version").get<int>() != kEmbeddingFormatVersion) {
            throw ModelFormatError("unsupported embedding version " + j.at("version").dump());
        }
        EmbeddingTable emb;
        emb.params = skipgram_params_from_json(j.at("hp"));
        emb.vocabulary = Vocabulary::from_tokens(j.at("tokens").get<std::vector<std::string>>(),
                                                 j.at("counts").get<std::vector<std::uint64_t>>());
        const auto d = j.at("d").get<std::size_t>();
        const auto rows = emb.vocabulary.size();
        auto read_matrix = [&](const nlohmann::json& m) {
            if (m.size() != rows) throw ModelFormatError("embedding matrix row count does not match vocabulary");
            Matrix out{rows, d, {}};
            out.data.reserve(rows * d);
            for (const auto& r : m) {
                if (r.size() != d) throw ModelFormatError("embedding row length does not match d");
                for (const auto& x : r) out.data.push_back(x.get<double>());
            }
            return out;
        };
        emb.input = read_matrix(j.at("input"));
        emb.output = j.contains("output") ? read_matrix(j.at("output"))
                                          : Matrix{rows, d, std::vector<double>(rows * d, 0.0)};
        if (j.contains("epoch_loss")) emb.epoch_loss = j.at("epoch_loss").get<std::vector<double>>();
        if (j.contains("training_pairs")) emb.training_pairs = j.at("training_pairs").get<std::uint64_t>();
        return emb;
    } catch (const nlohmann::json::exception& e) {
        throw ModelFormatError(std::string("invalid embedding file: ") + e.what());
    }
}

std::string content_hash(const EmbeddingTable& emb) { return sha256_hex(to_json(emb, false).dump()); }

} // namespace logprose
