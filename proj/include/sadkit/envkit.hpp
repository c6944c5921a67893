#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sadkit/common.hpp"
#include "sadkit/model.hpp"
#include "sadkit/segmenter.hpp"
#include "sadkit/tokenizer.hpp"

namespace sadkit {

// "KeyDoor": rooms holding a gem, a shelf and (difficulty >= 4) a locked door
// with a key. Goal: place the gem on the shelf.
struct WorldState {
  int difficulty = 1;
  std::vector<std::string> rooms;
  int agent_room = 0;
  int gem_room = 0;    // -1 once carried or placed
  int shelf_room = 0;
  bool has_lock = false;
  int locked_room = -1;  // the gem room when locked
  int key_room = -1;
  bool door_locked = false;
  bool carrying_gem = false;
  bool carrying_key = false;
  bool gem_placed = false;
  int step_count = 0;
  int max_steps = 0;
};

WorldState reset(std::uint64_t seed, int difficulty);

std::string observation_text(const WorldState& state, const std::string& event = "");

struct StepResult {
  std::string observation;
  bool done = false;
  bool success = false;
};

// Grammar: "goto <room>", "take <obj>", "open door", "place gem shelf".
// Invalid actions are no-ops ("nothing happens").
StepResult step(WorldState& state, const std::string& action_text);

// BFS over (agent, gem, key, lock) states; -1 when unreachable.
int oracle_plan_length(const WorldState& state);
bool oracle_solvable(const WorldState& state);

// Templated explanation of the next optimal subgoal plus the matching action.
// Returns {"Reasoning: ...", "Action: ..."}.
std::pair<std::string, std::string> scripted_teacher(const WorldState& state);

struct Episode {
  RawTrajectory trajectory;
  bool success = false;
  int steps = 0;  // reasoning+action turns
};

Episode run_teacher_episode(std::uint64_t seed, int difficulty);

using DifficultyMix = std::vector<std::pair<int, double>>;

// "1:0.2,2:0.5,3:0.3"
DifficultyMix parse_difficulty_mix(const std::string& text);
DifficultyMix default_difficulty_mix();

std::vector<RawTrajectory> generate_corpus(int n, std::uint64_t seed, const DifficultyMix& mix);

struct RolloutResult {
  bool success = false;
  int steps = 0;
  std::vector<int> student_reason_tokens;
  std::vector<int> teacher_reason_tokens;
};

// Closed-loop evaluation: per turn the student is prompted with the running
// transcript, greedy-decodes a reasoning line then an action line, and the
// parsed action is executed in the environment.
std::vector<RolloutResult> evaluate_policy(const ModelParams& params, const Vocab& vocab,
                                           int n_episodes, std::uint64_t seed,
                                           const DifficultyMix& mix);

// Scripted-teacher rollouts in the same result shape (oracle upper bound).
std::vector<RolloutResult> evaluate_scripted_teacher(const Vocab& vocab, int n_episodes,
                                                     std::uint64_t seed,
                                                     const DifficultyMix& mix);

}  // namespace sadkit
