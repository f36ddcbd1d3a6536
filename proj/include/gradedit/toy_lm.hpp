#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gradedit/numerics.hpp"
#include "gradedit/relaxed_prompt.hpp"

namespace gradedit {

// Word-level vocabulary with designated refusal and harmful token subsets.
// The two subsets must be disjoint.
struct Vocab {
  std::vector<std::string> tokens;
  std::vector<int> refusal_ids;  // sorted, unique
  std::vector<int> harmful_ids;  // sorted, unique

  int size() const { return static_cast<int>(tokens.size()); }

  // Index of a token string, or -1 when absent.
  int id_of(const std::string& word) const;

  void validate() const;
};

enum class Activation : std::uint32_t { kRelu = 0 };

// Fixed-window MLP language model. The embeddings of the `context_window`
// most recent tokens are concatenated and pushed through L bias-free linear
// layers with ReLU between them; an unembedding matrix maps the last hidden
// state to logits over the vocabulary.
//
// Pre-activations o_l = W_l h_{l-1} are exactly linear in W_l, which is what
// the rank-one closed-form edits in the interventions module rely on.
//
// Models are plain values: every query below is a pure function of the model
// and may run concurrently; training and editing build new models.
struct ToyLm {
  Vocab vocab;
  Mat embed;                // V x d_embed
  std::vector<Mat> layers;  // W_l : d_l x d_{l-1}; layer 0 input is the prompt
  Mat unembed;              // V x d_L
  int context_window = 4;
  Activation activation = Activation::kRelu;

  int vocab_size() const { return static_cast<int>(embed.rows()); }
  int embed_dim() const { return static_cast<int>(embed.cols()); }
  int input_dim() const { return context_window * embed_dim(); }
  int num_layers() const { return static_cast<int>(layers.size()); }

  // Checks dimension chaining and finiteness of all weights.
  void validate() const;
};

// Per-layer record of a single forward pass.
struct ForwardTrace {
  std::vector<Vec> pre_activations;  // o_l, one per layer
  std::vector<Vec> hidden;           // h_l = relu(o_l)
  Vec logits;                        // length V
  Vec probs;                         // softmax(logits)
};

// Gradients of a scalar loss with respect to every weight matrix and to the
// input embedding, computed by one backward pass.
struct LayerGradients {
  std::vector<Mat> layers;
  Mat unembed;
  Vec input;
};

struct TrainConfig {
  double learning_rate = 0.05;
  int epochs = 40;
  std::uint64_t seed = 0;
};

Vec softmax(const Vec& logits);

ToyLm make_random_model(const Vocab& vocab, int d_embed, int context_window,
                        const std::vector<int>& hidden_dims,
                        std::uint64_t seed);

ForwardTrace forward(const ToyLm& model, const Vec& prompt_embedding);

// Concatenation of the embedding rows of the given window of token ids.
Vec embed_prompt(const ToyLm& model, const std::vector<int>& token_ids);

// Expected embedding per position under the relaxed prompt, concatenated.
Vec embed_relaxed(const ToyLm& model, const RelaxedPrompt& prompt);

// Same computation on a raw positions x V matrix with no stochasticity
// check. Used by gradient checks, which perturb entries off the simplex.
Vec embed_distribution_rows(const ToyLm& model, const Mat& dist);

// Backward pass for a scalar loss whose gradient at the logits is given.
LayerGradients backprop(const ToyLm& model, const Vec& input,
                        const ForwardTrace& trace, const Vec& grad_logits);

// Deterministic greedy decoding; argmax ties break to the lowest token index.
// Returns the `steps` generated ids.
std::vector<int> greedy_decode(const ToyLm& model,
                               const std::vector<int>& seed_ids, int steps);

// exp(mean negative log-likelihood) over all positions that have a full
// context window, with probabilities floored at tol::kProbFloor.
double perplexity(const ToyLm& model, const std::vector<int>& token_ids);

double corpus_cross_entropy(const ToyLm& model,
                            const std::vector<std::vector<int>>& corpus);

// Plain SGD on the corpus cross-entropy (embeddings, layers and unembedding
// all trained). Returns the epoch snapshot with the lowest training loss,
// so the result is never worse than the input model on the training set.
ToyLm train_sgd(const ToyLm& model,
                const std::vector<std::vector<int>>& corpus,
                const TrainConfig& config);

// Binary weight container, magic "GRDE", format version 1. Round trips are
// bit-exact. Little-endian hosts only.
void save_weights(const ToyLm& model, const std::filesystem::path& path);
ToyLm load_weights(const std::filesystem::path& path);

// Serialized form of the model (same bytes as save_weights writes).
std::vector<std::uint8_t> serialize_weights(const ToyLm& model);

// FNV-1a hash of serialize_weights, as a hex string.
std::string weights_hash(const ToyLm& model);

}  // namespace gradedit
