#include "sadkit/envkit.hpp"

#include <algorithm>
#include <array>
#include <queue>
#include <random>
#include <sstream>

namespace sadkit {

namespace {

const std::array<const char*, 6> kRoomNames = {"kitchen", "pantry",  "hall",
                                               "cellar",  "study",   "attic"};

std::vector<std::string> split_words(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> words;
  std::string w;
  while (in >> w) words.push_back(w);
  return words;
}

int room_index(const WorldState& state, const std::string& name) {
  for (std::size_t i = 0; i < state.rooms.size(); ++i) {
    if (state.rooms[i] == name) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace

WorldState reset(std::uint64_t seed, int difficulty) {
  if (difficulty < 1 || difficulty > 5) {
    throw SadError(ErrorKind::BadConfig, "difficulty must be in 1..5");
  }
  std::mt19937_64 rng(seed);
  const int n_rooms = difficulty;

  WorldState state;
  state.difficulty = difficulty;

  // Sample room names without replacement.
  std::array<int, kRoomNames.size()> pool{};
  for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = static_cast<int>(i);
  for (int i = 0; i < n_rooms; ++i) {
    std::uniform_int_distribution<int> pick(i, static_cast<int>(pool.size()) - 1);
    std::swap(pool[i], pool[pick(rng)]);
    state.rooms.emplace_back(kRoomNames[pool[i]]);
  }

  std::uniform_int_distribution<int> any_room(0, n_rooms - 1);
  state.agent_room = 0;
  state.gem_room = any_room(rng);
  state.shelf_room = any_room(rng);
  state.has_lock = difficulty >= 4;
  if (state.has_lock) {
    // The gem room is locked; it cannot be the start room, and the key lies
    // in some other (reachable) room.
    std::uniform_int_distribution<int> non_start(1, n_rooms - 1);
    state.gem_room = non_start(rng);
    state.locked_room = state.gem_room;
    state.door_locked = true;
    int key = any_room(rng);
    while (key == state.gem_room) key = any_room(rng);
    state.key_room = key;
  }
  state.max_steps = 2 * n_rooms + 8;
  return state;
}

std::string observation_text(const WorldState& state, const std::string& event) {
  std::string obs = "Observation:";
  if (!event.empty()) obs += " " + event;
  obs += " the shelf is in the " + state.rooms[state.shelf_room] + ".";
  if (state.gem_placed) {
    obs += " the gem is on the shelf.";
  } else if (!state.carrying_gem) {
    obs += " the gem is in the " + state.rooms[state.gem_room] + ".";
  }
  if (state.has_lock && state.door_locked) {
    if (!state.carrying_key) {
      obs += " the key is in the " + state.rooms[state.key_room] + ".";
    }
    obs += " the door of the " + state.rooms[state.locked_room] + " is locked.";
  }
  obs += " you are in the " + state.rooms[state.agent_room] + ".";
  if (state.carrying_gem) {
    obs += " you carry the gem.";
  } else if (state.carrying_key) {
    obs += " you carry the key.";
  } else {
    obs += " you carry nothing.";
  }
  return obs;
}

StepResult step(WorldState& state, const std::string& action_text) {
  ++state.step_count;
  std::string event = "nothing happens.";
  const std::vector<std::string> words = split_words(action_text);

  if (words.size() == 2 && words[0] == "goto") {
    const int target = room_index(state, words[1]);
    if (target >= 0 && target != state.agent_room) {
      if (state.door_locked && target == state.locked_room) {
        event = "the door is locked.";
      } else {
        state.agent_room = target;
        event = "";
      }
    }
  } else if (words.size() == 2 && words[0] == "take") {
    if (words[1] == "gem" && !state.carrying_gem && !state.gem_placed &&
        state.gem_room == state.agent_room) {
      state.carrying_gem = true;
      state.gem_room = -1;
      event = "";
    } else if (words[1] == "key" && state.has_lock && !state.carrying_key &&
               state.key_room == state.agent_room) {
      state.carrying_key = true;
      state.key_room = -1;
      event = "";
    }
  } else if (words.size() == 2 && words[0] == "open" && words[1] == "door") {
    if (state.door_locked && state.carrying_key) {
      state.door_locked = false;
      event = "";
    }
  } else if (words.size() == 3 && words[0] == "place" && words[1] == "gem" &&
             words[2] == "shelf") {
    if (state.carrying_gem && state.agent_room == state.shelf_room) {
      state.carrying_gem = false;
      state.gem_placed = true;
      event = "";
    }
  }

  StepResult result;
  result.success = state.gem_placed;
  result.done = result.success || state.step_count >= state.max_steps;
  result.observation = observation_text(state, event);
  return result;
}

namespace {

// BFS state encoding: agent room, gem location (room / held=-1 / placed=-2),
// key location (room / held=-1 / absent=-2), door locked flag.
struct SearchNode {
  int agent, gem, key;
  bool locked;
  bool operator==(const SearchNode&) const = default;
};

int encode(const SearchNode& n, int n_rooms) {
  const int gem_states = n_rooms + 2;
  const int key_states = n_rooms + 2;
  int code = n.agent;
  code = code * gem_states + (n.gem < 0 ? n_rooms - 1 - n.gem : n.gem);
  code = code * key_states + (n.key < 0 ? n_rooms - 1 - n.key : n.key);
  code = code * 2 + (n.locked ? 1 : 0);
  return code;
}

}  // namespace

int oracle_plan_length(const WorldState& state) {
  if (state.gem_placed) return 0;
  const int n_rooms = static_cast<int>(state.rooms.size());
  SearchNode start{state.agent_room,
                   state.carrying_gem ? -1 : state.gem_room,
                   state.has_lock ? (state.carrying_key ? -1 : state.key_room) : -2,
                   state.door_locked};

  const int gem_states = n_rooms + 2;
  const int key_states = n_rooms + 2;
  std::vector<int> dist(static_cast<std::size_t>(n_rooms) * gem_states * key_states * 2, -1);
  std::queue<SearchNode> frontier;
  dist[static_cast<std::size_t>(encode(start, n_rooms))] = 0;
  frontier.push(start);

  while (!frontier.empty()) {
    const SearchNode cur = frontier.front();
    frontier.pop();
    const int d = dist[static_cast<std::size_t>(encode(cur, n_rooms))];

    std::vector<SearchNode> next;
    for (int r = 0; r < n_rooms; ++r) {
      if (r == cur.agent) continue;
      if (cur.locked && r == state.locked_room) continue;
      SearchNode n = cur;
      n.agent = r;
      next.push_back(n);
    }
    if (cur.gem == cur.agent) {
      SearchNode n = cur;
      n.gem = -1;
      next.push_back(n);
    }
    if (cur.key == cur.agent) {
      SearchNode n = cur;
      n.key = -1;
      next.push_back(n);
    }
    if (cur.locked && cur.key == -1) {
      SearchNode n = cur;
      n.locked = false;
      next.push_back(n);
    }
    if (cur.gem == -1 && cur.agent == state.shelf_room) {
      SearchNode n = cur;
      n.gem = -2;  // placed
      if (dist[static_cast<std::size_t>(encode(n, n_rooms))] < 0) return d + 1;
    }
    for (const SearchNode& n : next) {
      const auto code = static_cast<std::size_t>(encode(n, n_rooms));
      if (dist[code] < 0) {
        dist[code] = d + 1;
        frontier.push(n);
      }
    }
  }
  return -1;
}

bool oracle_solvable(const WorldState& state) { return oracle_plan_length(state) >= 0; }

std::pair<std::string, std::string> scripted_teacher(const WorldState& state) {
  if (state.gem_placed) {
    throw SadError(ErrorKind::Unsolvable, "teacher queried after goal completion");
  }
  const auto room = [&state](int i) { return state.rooms[static_cast<std::size_t>(i)]; };

  if (state.carrying_gem) {
    if (state.agent_room == state.shelf_room) {
      return {"Reasoning: I am at the shelf, so I should place the gem on it.",
              "Action: place gem shelf"};
    }
    return {"Reasoning: the shelf is in the " + room(state.shelf_room) +
                ", so I should go there.",
            "Action: goto " + room(state.shelf_room)};
  }

  const bool gem_blocked = state.door_locked && state.gem_room == state.locked_room;
  if (gem_blocked) {
    if (state.carrying_key) {
      return {"Reasoning: I have the key, so I should open the locked door now.",
              "Action: open door"};
    }
    if (state.agent_room == state.key_room) {
      return {"Reasoning: the key is right here, so I should pick it up.",
              "Action: take key"};
    }
    if (state.key_room < 0) {
      throw SadError(ErrorKind::Unsolvable, "key unavailable while door is locked");
    }
    return {"Reasoning: the door is locked and the key is in the " + room(state.key_room) +
                ", so I should fetch the key first.",
            "Action: goto " + room(state.key_room)};
  }
  if (state.agent_room == state.gem_room) {
    return {"Reasoning: the gem is right here, so I should pick it up.",
            "Action: take gem"};
  }
  return {"Reasoning: the gem is in the " + room(state.gem_room) + ", so I should go there.",
          "Action: goto " + room(state.gem_room)};
}

Episode run_teacher_episode(std::uint64_t seed, int difficulty) {
  WorldState state = reset(seed, difficulty);

  Episode episode;
  episode.trajectory.env_name = "keydoor";
  episode.trajectory.goal = "put the gem on the shelf.";
  episode.trajectory.task_id =
      "keydoor-d" + std::to_string(difficulty) + "-s" + std::to_string(seed);
  episode.trajectory.lines.push_back("Goal: put the gem on the shelf.");
  episode.trajectory.lines.push_back(observation_text(state));

  while (true) {
    const auto [reason_line, action_line] = scripted_teacher(state);
    episode.trajectory.lines.push_back(reason_line);
    episode.trajectory.lines.push_back(action_line);
    ++episode.steps;
    const StepResult result = step(state, action_line.substr(std::string("Action: ").size()));
    episode.trajectory.lines.push_back(result.observation);
    if (result.done) {
      episode.success = result.success;
      break;
    }
  }
  episode.trajectory.final_success = episode.success;
  return episode;
}

DifficultyMix parse_difficulty_mix(const std::string& text) {
  DifficultyMix mix;
  std::istringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    const auto colon = part.find(':');
    if (colon == std::string::npos) {
      throw SadError(ErrorKind::BadConfig, "difficulty mix entry \"" + part + "\"");
    }
    mix.emplace_back(std::stoi(part.substr(0, colon)), std::stod(part.substr(colon + 1)));
  }
  if (mix.empty()) throw SadError(ErrorKind::BadConfig, "empty difficulty mix");
  double total = 0.0;
  for (const auto& [d, frac] : mix) {
    if (d < 1 || d > 5 || frac < 0.0) {
      throw SadError(ErrorKind::BadConfig, "invalid difficulty mix entry");
    }
    total += frac;
  }
  if (total <= 0.0) throw SadError(ErrorKind::BadConfig, "difficulty mix sums to zero");
  for (auto& [d, frac] : mix) frac /= total;
  return mix;
}

DifficultyMix default_difficulty_mix() { return {{1, 0.25}, {2, 0.4}, {3, 0.35}}; }

namespace {

int draw_difficulty(const DifficultyMix& mix, double u) {
  double acc = 0.0;
  for (const auto& [d, frac] : mix) {
    acc += frac;
    if (u < acc) return d;
  }
  return mix.back().first;
}

}  // namespace

std::vector<RawTrajectory> generate_corpus(int n, std::uint64_t seed, const DifficultyMix& mix) {
  if (n < 1) throw SadError(ErrorKind::BadConfig, "corpus size must be >= 1");
  std::mt19937_64 master(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<RawTrajectory> corpus;
  corpus.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int difficulty = draw_difficulty(mix, unit(master));
    const std::uint64_t ep_seed = master();
    Episode episode = run_teacher_episode(ep_seed, difficulty);
    // Stable, sortable ids.
    char id[64];
    std::snprintf(id, sizeof(id), "keydoor-%06d-d%d", i, difficulty);
    episode.trajectory.task_id = id;
    corpus.push_back(std::move(episode.trajectory));
  }
  return corpus;
}

namespace {

std::vector<int> tokenize_ids(const std::string& text, const Vocab& vocab) {
  std::vector<int> ids;
  for (const RawToken& t : lex(text)) ids.push_back(vocab.lookup(t.text));
  return ids;
}

constexpr int kMaxReasonTokens = 24;
constexpr int kMaxActionTokens = 6;

}  // namespace

std::vector<RolloutResult> evaluate_policy(const ModelParams& params, const Vocab& vocab,
                                           int n_episodes, std::uint64_t seed,
                                           const DifficultyMix& mix) {
  if (n_episodes < 1) throw SadError(ErrorKind::BadConfig, "n_episodes must be >= 1");
  const int id_reasoning = vocab.lookup("Reasoning");
  const int id_action = vocab.lookup("Action");
  const int id_observation = vocab.lookup("Observation");
  const int id_colon = vocab.lookup(":");

  std::mt19937_64 master(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<RolloutResult> results;
  results.reserve(static_cast<std::size_t>(n_episodes));
  for (int i = 0; i < n_episodes; ++i) {
    const int difficulty = draw_difficulty(mix, unit(master));
    const std::uint64_t ep_seed = master();
    WorldState state = reset(ep_seed, difficulty);

    RolloutResult rollout;
    std::vector<int> transcript =
        tokenize_ids("Goal: put the gem on the shelf. " + observation_text(state), vocab);

    bool done = false;
    while (!done) {
      // Reference reasoning for the state actually reached.
      const auto [teacher_reason, teacher_action] = scripted_teacher(state);
      const std::string payload = teacher_reason.substr(std::string("Reasoning: ").size());
      for (int id : tokenize_ids(payload, vocab)) rollout.teacher_reason_tokens.push_back(id);
      (void)teacher_action;

      // Student reasoning line (structure forced, content generated).
      transcript.push_back(id_reasoning);
      transcript.push_back(id_colon);
      for (int k = 0; k < kMaxReasonTokens; ++k) {
        const int next = predict_next(params, transcript);
        if (next == id_action) break;
        transcript.push_back(next);
        rollout.student_reason_tokens.push_back(next);
      }

      // Student action line. The harness owns the line structure, so it also
      // ends the action once the verb's argument count is satisfied (the stop
      // token itself is outside every supervised span and thus untrained).
      transcript.push_back(id_action);
      transcript.push_back(id_colon);
      std::vector<int> action_ids;
      std::string action_text;
      for (int k = 0; k < kMaxActionTokens; ++k) {
        const int next = predict_next(params, transcript);
        if (next == id_observation || next == id_reasoning || next == id_action) break;
        transcript.push_back(next);
        action_ids.push_back(next);
        if (!action_text.empty()) action_text += ' ';
        action_text += vocab.id_to_token[static_cast<std::size_t>(next)];
        const std::string& verb = vocab.id_to_token[static_cast<std::size_t>(action_ids[0])];
        const std::size_t arity = verb == "place" ? 3 : 2;
        if (action_ids.size() >= arity) break;
      }

      const StepResult result = step(state, action_text);
      ++rollout.steps;
      done = result.done;
      rollout.success = result.success;
      if (!done) {
        for (int id : tokenize_ids(result.observation, vocab)) transcript.push_back(id);
      }
    }
    results.push_back(std::move(rollout));
  }
  return results;
}

std::vector<RolloutResult> evaluate_scripted_teacher(const Vocab& vocab, int n_episodes,
                                                     std::uint64_t seed,
                                                     const DifficultyMix& mix) {
  if (n_episodes < 1) throw SadError(ErrorKind::BadConfig, "n_episodes must be >= 1");
  std::mt19937_64 master(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<RolloutResult> results;
  for (int i = 0; i < n_episodes; ++i) {
    const int difficulty = draw_difficulty(mix, unit(master));
    const std::uint64_t ep_seed = master();
    WorldState state = reset(ep_seed, difficulty);
    RolloutResult rollout;
    bool done = false;
    while (!done) {
      const auto [reason_line, action_line] = scripted_teacher(state);
      const std::string payload = reason_line.substr(std::string("Reasoning: ").size());
      for (int id : tokenize_ids(payload, vocab)) {
        rollout.teacher_reason_tokens.push_back(id);
        rollout.student_reason_tokens.push_back(id);
      }
      const StepResult result = step(state, action_line.substr(std::string("Action: ").size()));
      ++rollout.steps;
      done = result.done;
      rollout.success = result.success;
    }
    results.push_back(std::move(rollout));
  }
  return results;
}

}  // namespace sadkit
