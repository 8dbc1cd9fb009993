#include "kermit/train.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <unordered_map>
#include <unordered_set>

#include "kermit/checkpoint.hpp"
#include "kermit/rng.hpp"

namespace kermit {

void TrainBatch::validate() const {
  if (answers.size() != queries.size() || answer_ids.size() != queries.size()) {
    throw ContractError("batch sides disagree: " +
                        std::to_string(queries.size()) + " queries, " +
                        std::to_string(answers.size()) + " answers, " +
                        std::to_string(answer_ids.size()) + " answer ids");
  }
  if (queries.size() < 2) {
    throw BatchError("in-batch negatives need at least 2 queries, got " +
                     std::to_string(queries.size()));
  }
  std::unordered_set<EntityId> seen;
  for (EntityId id : answer_ids) {
    if (!seen.insert(id).second) {
      throw ContractError("batch answers repeat entity " + std::to_string(id));
    }
  }
}

std::vector<std::size_t> epoch_shuffle(std::size_t n, std::uint64_t seed,
                                       int epoch) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(epoch)));
  rng.shuffle(order);
  return order;
}

namespace {

constexpr std::uint64_t kTowerInitSalt = 0xFFFFFFFF00000001ull;

// One parameter table with its optimizer state and current gradient.
struct OptimizerSlot {
  Mat* param;
  Mat* m;
  Mat* v;
  const Mat* grad;
};

// Decoupled weight decay: the decay term multiplies the raw parameter, not
// the adaptive update, so regularization strength is independent of the
// gradient scale.
void adamw_step(const std::vector<OptimizerSlot>& slots,
                const TrainConfig& config, double lr, std::size_t step) {
  const double bias1 = 1.0 - std::pow(config.beta1, static_cast<double>(step));
  const double bias2 = 1.0 - std::pow(config.beta2, static_cast<double>(step));
  for (const OptimizerSlot& slot : slots) {
    slot.m->array() = config.beta1 * slot.m->array() +
                      (1.0 - config.beta1) * slot.grad->array();
    slot.v->array() = config.beta2 * slot.v->array() +
                      (1.0 - config.beta2) * slot.grad->array().square();
    slot.param->array() -=
        lr * ((slot.m->array() / bias1) /
                  ((slot.v->array() / bias2).sqrt() + config.epsilon) +
              config.weight_decay * slot.param->array());
  }
}

std::filesystem::path epoch_checkpoint_path(
    const std::filesystem::path& directory, int epoch) {
  char name[32];
  std::snprintf(name, sizeof(name), "epoch_%04d.ckpt", epoch);
  return directory / name;
}

}  // namespace

TrainResult fit(const KnowledgeGraph& graph, const std::vector<Query>& queries,
                const DescriptionCache* cache, const TrainConfig& train_config,
                const LossConfig& loss_config, SequenceMode mode) {
  const auto started = std::chrono::steady_clock::now();
  if (queries.empty()) throw DataError("no training queries");
  if (queries.size() < 2) {
    throw DataError("training needs at least 2 queries for in-batch negatives");
  }
  if (train_config.epochs < 1) throw ConfigError("epochs must be >= 1");
  if (train_config.learning_rate <= 0.0) {
    throw ConfigError("learning rate must be positive");
  }
  if (train_config.batch_size < 2) throw ConfigError("batch size must be >= 2");
  if (train_config.min_vocab_frequency < 1) {
    throw ConfigError("minimum vocabulary frequency must be >= 1");
  }

  // Predictive descriptions, where the mode consumes them.
  const std::size_t n = queries.size();
  std::vector<std::string> pred_texts(n);
  if (mode != SequenceMode::baseline) {
    if (cache == nullptr) {
      throw DataError(std::string("mode '") + to_string(mode) +
                      "' needs a description cache");
    }
    for (std::size_t i = 0; i < n; ++i) {
      const QueryKey key = make_query_key(graph, queries[i]);
      const PredictiveDescription* found = cache->find(key);
      if (found == nullptr) {
        throw DataError("no cached description for query " + key.packed());
      }
      pred_texts[i] = found->text;
    }
  }

  // Vocabulary over everything the sequences can mention, in a fixed order.
  std::vector<std::string> corpus;
  corpus.reserve(2 * graph.entities().size() + graph.relations().size() +
                 (mode == SequenceMode::baseline ? 0 : n));
  for (const Entity& entity : graph.entities()) {
    corpus.push_back(entity.name);
    if (!entity.description.empty()) corpus.push_back(entity.description);
  }
  for (const Relation& relation : graph.relations()) {
    corpus.push_back(relation.name);
  }
  if (mode != SequenceMode::baseline) {
    for (const std::string& text : pred_texts) corpus.push_back(text);
  }
  Vocabulary vocabulary =
      Vocabulary::build(corpus, train_config.min_vocab_frequency);

  // Token sequences are fixed for the whole run; answers are shared per
  // entity.
  std::vector<TokenSequence> query_sequences;
  query_sequences.reserve(n);
  std::unordered_map<EntityId, TokenSequence> answer_sequences;
  for (std::size_t i = 0; i < n; ++i) {
    const Query& query = queries[i];
    query_sequences.push_back(build_query_sequence(
        entity_text(graph.entity(query.source)),
        graph.relation(query.relation).name, pred_texts[i], mode, vocabulary,
        train_config.max_len));
    if (answer_sequences.find(query.answer) == answer_sequences.end()) {
      answer_sequences.emplace(
          query.answer,
          build_entity_sequence(entity_text(graph.entity(query.answer)),
                                vocabulary, train_config.max_len));
    }
  }

  // Both towers start as twins and are pulled apart by training.
  const std::uint64_t init_seed = derive_seed(train_config.seed, kTowerInitSalt);
  EncoderModel q_model =
      EncoderModel::init(vocabulary.size(), train_config.max_len,
                         train_config.d, train_config.pooling, init_seed);
  EncoderModel e_model =
      EncoderModel::init(vocabulary.size(), train_config.max_len,
                         train_config.d, train_config.pooling, init_seed);

  Gradients first_moment = Gradients::zeros_like(q_model, e_model);
  Gradients second_moment = Gradients::zeros_like(q_model, e_model);

  TrainResult result;
  if (!train_config.checkpoint_dir.empty()) {
    std::filesystem::create_directories(train_config.checkpoint_dir);
  }

  const std::size_t batch_size =
      std::min(static_cast<std::size_t>(train_config.batch_size), n);
  std::size_t step = 0;
  for (int epoch = 0; epoch < train_config.epochs; ++epoch) {
    // Linear decay: full rate in the first epoch, 1/epochs of it in the last.
    const double lr = train_config.learning_rate *
                      static_cast<double>(train_config.epochs - epoch) /
                      static_cast<double>(train_config.epochs);
    const std::vector<std::size_t> order =
        epoch_shuffle(n, train_config.seed, epoch);
    double loss_sum = 0.0;
    std::size_t loss_count = 0;
    for (std::size_t start = 0; start < n; start += batch_size) {
      const std::size_t stop = std::min(start + batch_size, n);
      TrainBatch batch;
      std::unordered_set<EntityId> taken;
      for (std::size_t k = start; k < stop; ++k) {
        const std::size_t i = order[k];
        const EntityId answer = queries[i].answer;
        // Duplicate answers within a chunk would make false negatives; keep
        // the first occurrence only.
        if (!taken.insert(answer).second) continue;
        batch.queries.push_back(query_sequences[i]);
        batch.answers.push_back(answer_sequences.at(answer));
        batch.answer_ids.push_back(answer);
      }
      if (batch.size() < 2) continue;
      Gradients gradients;
      const double loss =
          compute_gradients(q_model, e_model, batch, loss_config, gradients);
      ++step;
      adamw_step(
          {{&q_model.token_table, &first_moment.q_token,
            &second_moment.q_token, &gradients.q_token},
           {&q_model.position_table, &first_moment.q_position,
            &second_moment.q_position, &gradients.q_position},
           {&q_model.segment_table, &first_moment.q_segment,
            &second_moment.q_segment, &gradients.q_segment},
           {&e_model.token_table, &first_moment.e_token,
            &second_moment.e_token, &gradients.e_token},
           {&e_model.position_table, &first_moment.e_position,
            &second_moment.e_position, &gradients.e_position},
           {&e_model.segment_table, &first_moment.e_segment,
            &second_moment.e_segment, &gradients.e_segment}},
          train_config, lr, step);
      loss_sum += loss * static_cast<double>(batch.size());
      loss_count += batch.size();
    }
    result.epoch_loss.push_back(
        loss_count == 0 ? 0.0 : loss_sum / static_cast<double>(loss_count));
    if (!train_config.checkpoint_dir.empty() &&
        train_config.checkpoint_every > 0 &&
        (epoch + 1) % train_config.checkpoint_every == 0) {
      save_checkpoint(
          epoch_checkpoint_path(train_config.checkpoint_dir, epoch + 1),
          Checkpoint{q_model, e_model, vocabulary, mode});
    }
  }

  if (!train_config.checkpoint_dir.empty()) {
    result.final_checkpoint = train_config.checkpoint_dir / "final.ckpt";
    save_checkpoint(result.final_checkpoint,
                    Checkpoint{q_model, e_model, vocabulary, mode});
  }
  result.q_model = std::move(q_model);
  result.e_model = std::move(e_model);
  result.vocabulary = std::move(vocabulary);
  result.steps = step;
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  return result;
}

}  // namespace kermit
