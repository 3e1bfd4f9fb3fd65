#include "quip/service.hpp"

#include <condition_variable>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <iostream>
#include <thread>

#include "quip/text.hpp"

namespace quip {

// ---------------------------------------------------------------- config

namespace {

std::filesystem::path path_field(const nlohmann::json& v, const std::string& key) {
    if (!v.is_string()) throw Error(ErrorCode::invalid_config, key + " must be a string path");
    return v.get<std::string>();
}

}  // namespace

ServiceConfig ServiceConfig::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error(ErrorCode::invalid_config, "config must be a JSON object");
    ServiceConfig c;
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "host") {
                c.host = value.get<std::string>();
            } else if (key == "port") {
                c.port = value.get<int>();
            } else if (key == "providers") {
                c.providers = ProvidersConfig::from_json(value);
            } else if (key == "templates_path") {
                c.templates_path = path_field(value, key);
            } else if (key == "stopwords_path") {
                c.stopwords_path = path_field(value, key);
            } else if (key == "log_dir") {
                c.log_dir = path_field(value, key);
            } else if (key == "mode_config") {
                c.mode_config = apply_overrides(c.mode_config, value);
            } else if (key == "default_mode") {
                auto m = parse_mode(value.get<std::string>());
                if (!m) throw Error(ErrorCode::invalid_config, "unknown default_mode");
                c.default_mode = *m;
            } else if (key == "keyword_source") {
                const auto s = value.get<std::string>();
                if (s == "local") {
                    c.keyword_source = ExtractionSource::local;
                } else if (s == "llm") {
                    c.keyword_source = ExtractionSource::llm;
                } else {
                    throw Error(ErrorCode::invalid_config, "keyword_source must be local or llm");
                }
            } else if (key == "debounce_ms") {
                c.engine.debounce_ms = value.get<Millis>();
            } else if (key == "voice") {
                c.engine.voice = value.get<std::string>();
            } else if (key == "virtual_time") {
                c.virtual_time = value.get<bool>();
            } else {
                throw Error(ErrorCode::invalid_config, "unknown config key " + key);
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::invalid_config, std::string("bad config value: ") + e.what());
    }
    if (c.port < 0 || c.port > 65535) throw Error(ErrorCode::invalid_config, "port out of range");
    if (c.engine.debounce_ms < 0) throw Error(ErrorCode::invalid_config, "debounce_ms must be >= 0");
    return c;
}

ServiceConfig ServiceConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io_failure, "cannot read config " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::invalid_config, path.string() + ": " + e.what());
    }
    return from_json(j);
}

void ServiceConfig::apply_env(const std::function<const char*(const char*)>& getenv_fn) {
    auto get = [&](const char* name) -> const char* { return getenv_fn ? getenv_fn(name) : std::getenv(name); };
    if (const char* v = get("QUIP_PORT")) {
        try {
            std::size_t used = 0;
            port = std::stoi(v, &used);
            if (used != std::string_view(v).size() || port < 0 || port > 65535) throw std::invalid_argument(v);
        } catch (const std::exception&) {
            throw Error(ErrorCode::invalid_config, std::string("QUIP_PORT is not a port: ") + v);
        }
    }
    if (const char* v = get("QUIP_PROVIDERS")) {
        const std::string s = trim(v);
        if (!s.empty() && s.front() == '{') {
            try {
                providers = ProvidersConfig::from_json(nlohmann::json::parse(s));
            } catch (const nlohmann::json::exception& e) {
                throw Error(ErrorCode::invalid_config, std::string("QUIP_PROVIDERS: ") + e.what());
            }
        } else {
            providers = ProvidersConfig::from_json(nlohmann::json(s));
        }
    }
    if (const char* v = get("QUIP_TEMPLATES")) templates_path = std::filesystem::path(v);
    if (const char* v = get("QUIP_STOPWORDS")) stopwords_path = std::filesystem::path(v);
    if (const char* v = get("QUIP_LOG_DIR")) log_dir = std::filesystem::path(v);
}

nlohmann::json ServiceConfig::to_json() const {
    nlohmann::json j = {{"host", host},
                        {"port", port},
                        {"providers", providers.to_json()},
                        {"log_dir", log_dir.string()},
                        {"mode_config", quip::to_json(mode_config)},
                        {"default_mode", to_string(default_mode)},
                        {"keyword_source", keyword_source == ExtractionSource::llm ? "llm" : "local"},
                        {"debounce_ms", engine.debounce_ms},
                        {"voice", engine.voice},
                        {"virtual_time", virtual_time}};
    if (templates_path) j["templates_path"] = templates_path->string();
    if (stopwords_path) j["stopwords_path"] = stopwords_path->string();
    return j;
}

// ---------------------------------------------------------------- runners

namespace {

using Task = std::function<void()>;

// Executes provider rounds one at a time on its own thread and hands each
// outcome to `post`, which moves it onto the session queue.
class AsyncRunner final : public GenerationRunner {
public:
    explicit AsyncRunner(std::function<void(Task)> post) : post_(std::move(post)), thread_([this] { loop(); }) {}

    ~AsyncRunner() override {
        {
            std::lock_guard lk(mu_);
            stopping_ = true;
        }
        cv_.notify_all();
        thread_.join();
    }

    void run(std::function<GenerationOutcome()> work, std::function<void(GenerationOutcome)> done) override {
        {
            std::lock_guard lk(mu_);
            if (stopping_) return;
            jobs_.push_back({std::move(work), std::move(done)});
        }
        cv_.notify_all();
    }

private:
    struct Job {
        std::function<GenerationOutcome()> work;
        std::function<void(GenerationOutcome)> done;
    };

    void loop() {
        std::unique_lock lk(mu_);
        for (;;) {
            cv_.wait(lk, [&] { return stopping_ || !jobs_.empty(); });
            if (stopping_) return;
            Job job = std::move(jobs_.front());
            jobs_.pop_front();
            lk.unlock();
            GenerationOutcome outcome = job.work();
            post_([done = std::move(job.done), outcome = std::move(outcome)] { done(outcome); });
            lk.lock();
        }
    }

    std::function<void(Task)> post_;
    std::mutex mu_;
    std::condition_variable cv_;
    std::deque<Job> jobs_;
    bool stopping_ = false;
    std::thread thread_;
};

}  // namespace

// ---------------------------------------------------------------- session handle

class SessionHandle {
public:
    SessionId id;
    std::unique_ptr<Clock> clock;
    ManualClock* manual = nullptr;
    ProviderSet providers;
    std::shared_ptr<MockTts> mock_tts;
    std::shared_ptr<KeywordEngine> keywords;
    std::shared_ptr<SuggestionEngine> suggestions;
    std::unique_ptr<GenerationRunner> runner;
    std::unique_ptr<EventLogWriter> writer;
    std::unique_ptr<SessionEngine> engine;

    // Retained history; events[i].seq == i + 1.
    mutable std::mutex ev_mu;
    std::condition_variable ev_cv;
    std::vector<ServerEvent> events;
    bool closed = false;

    ~SessionHandle() { stop(); }

    void publish(const ServerEvent& ev) {
        if (writer) {
            try {
                writer->append(ev);
            } catch (const Error& e) {
                std::cerr << "quip: " << id << ": " << e.what() << "\n";
            }
        }
        {
            std::lock_guard lk(ev_mu);
            events.push_back(ev);
        }
        ev_cv.notify_all();
    }

    std::int64_t last_seq() const {
        std::lock_guard lk(ev_mu);
        return static_cast<std::int64_t>(events.size());
    }

    bool post(Task task) {
        {
            std::lock_guard lk(q_mu_);
            if (stopping_) return false;
            queue_.push_back(std::move(task));
        }
        q_cv_.notify_all();
        return true;
    }

    // Runs `fn` on the session thread and waits for its result.
    template <typename Fn>
    auto call(Fn fn) -> decltype(fn()) {
        using R = decltype(fn());
        auto task = std::make_shared<std::packaged_task<R()>>(std::move(fn));
        auto result = task->get_future();
        if (!post([task] { (*task)(); })) throw Error(ErrorCode::session_not_found, "session " + id + " is closed");
        return result.get();
    }

    void start_worker() { worker_ = std::thread([this] { loop(); }); }

    void attach_asr(std::unique_ptr<AsrStream> stream) {
        std::lock_guard lk(asr_mu_);
        if (asr_thread_.joinable()) throw Error(ErrorCode::precondition, "ASR already attached to " + id);
        asr_thread_ = std::thread([this, stream = std::move(stream)]() mutable { pump(*stream); });
    }

    void stop() {
        {
            std::lock_guard lk(asr_mu_);
            asr_stop_ = true;
        }
        asr_cv_.notify_all();
        if (asr_thread_.joinable()) asr_thread_.join();
        {
            std::lock_guard lk(q_mu_);
            stopping_ = true;
        }
        q_cv_.notify_all();
        if (worker_.joinable()) worker_.join();
        // late provider results find the queue closed and are dropped
        runner.reset();
        {
            std::lock_guard lk(ev_mu);
            closed = true;
        }
        ev_cv.notify_all();
    }

private:
    void loop() {
        std::unique_lock lk(q_mu_);
        for (;;) {
            if (!queue_.empty()) {
                Task task = std::move(queue_.front());
                queue_.pop_front();
                lk.unlock();
                task();
                safe_poll();
                lk.lock();
                continue;
            }
            if (stopping_) return;
            const auto deadline = engine->next_deadline();
            if (deadline && !manual) {
                const Millis wait = *deadline - clock->now_ms();
                if (wait <= 0 || !q_cv_.wait_for(lk, std::chrono::milliseconds(wait),
                                                 [&] { return stopping_ || !queue_.empty(); })) {
                    lk.unlock();
                    safe_poll();
                    lk.lock();
                }
            } else {
                q_cv_.wait(lk, [&] { return stopping_ || !queue_.empty(); });
            }
        }
    }

    void safe_poll() {
        try {
            engine->poll();
        } catch (const Error& e) {
            engine->report(EventKind::error, Interaction::command_rejected, e.code(), e.what());
        }
    }

    void pump(AsrStream& stream) {
        Millis last_ts = 0;
        for (;;) {
            std::optional<TranscriptEvent> ev;
            try {
                ev = stream.next();
            } catch (const Error& e) {
                const ErrorCode code = e.code();
                const std::string message = e.what();
                post([this, code, message] { engine->report(EventKind::error, Interaction::asr_error, code, message); });
                return;
            }
            if (!ev) return;
            if (!manual && ev->timestamp > last_ts) {
                std::unique_lock lk(asr_mu_);
                if (asr_cv_.wait_for(lk, std::chrono::milliseconds(ev->timestamp - last_ts), [&] { return asr_stop_; })) {
                    return;
                }
            }
            last_ts = ev->timestamp;
            if (!ev->is_final) continue;
            Command c;
            c.session_id = id;
            c.kind = CommandKind::ingest_text;
            c.payload = {{"speaker", std::string(to_string(ev->speaker.value_or(Speaker::partner)))}, {"text", ev->text}};
            c.client_ts = ev->timestamp;
            if (!post([this, c] { engine->apply(c); })) return;
        }
    }

    std::mutex q_mu_;
    std::condition_variable q_cv_;
    std::deque<Task> queue_;
    bool stopping_ = false;
    std::thread worker_;

    std::mutex asr_mu_;
    std::condition_variable asr_cv_;
    bool asr_stop_ = false;
    std::thread asr_thread_;
};

// ---------------------------------------------------------------- subscription

Subscription::Subscription(std::shared_ptr<SessionHandle> session, std::int64_t from_seq)
    : session_(std::move(session)), cursor_(std::max<std::int64_t>(from_seq, 0)) {}

std::optional<ServerEvent> Subscription::next(std::chrono::milliseconds timeout) {
    std::unique_lock lk(session_->ev_mu);
    const auto ready = [&] { return static_cast<std::int64_t>(session_->events.size()) > cursor_ || session_->closed; };
    if (!session_->ev_cv.wait_for(lk, timeout, ready)) return std::nullopt;
    if (static_cast<std::int64_t>(session_->events.size()) <= cursor_) return std::nullopt;
    return session_->events[static_cast<std::size_t>(cursor_++)];
}

std::vector<ServerEvent> Subscription::poll(std::size_t max) {
    std::lock_guard lk(session_->ev_mu);
    std::vector<ServerEvent> out;
    while (static_cast<std::int64_t>(session_->events.size()) > cursor_ && out.size() < max) {
        out.push_back(session_->events[static_cast<std::size_t>(cursor_++)]);
    }
    return out;
}

bool Subscription::finished() const {
    std::lock_guard lk(session_->ev_mu);
    return session_->closed && static_cast<std::int64_t>(session_->events.size()) <= cursor_;
}

// ---------------------------------------------------------------- service

SessionService::SessionService(ServiceConfig config)
    : config_(std::move(config)),
      templates_(config_.templates_path ? PromptTemplates::load(*config_.templates_path) : PromptTemplates::builtin()),
      stopwords_(config_.stopwords_path ? Stopwords::load(*config_.stopwords_path) : Stopwords::builtin()),
      lexicon_(AssociationLexicon::builtin()) {
    config_.mode_config.validate();
    ProviderRegistry::instance().build(config_.providers);  // fail fast on unknown ids
    if (!config_.log_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(config_.log_dir, ec);
        if (ec) throw Error(ErrorCode::io_failure, "cannot create log dir " + config_.log_dir.string());
        for (const auto& entry : std::filesystem::directory_iterator(config_.log_dir)) {
            const std::string name = entry.path().filename().string();
            unsigned long long n = 0;
            char tail[8] = {};
            if (std::sscanf(name.c_str(), "sess-%llu.%7s", &n, tail) == 2 && std::string_view(tail) == "log") {
                id_counter_ = std::max<std::uint64_t>(id_counter_, n);
            }
        }
    }
}

SessionService::~SessionService() {
    std::map<SessionId, std::shared_ptr<SessionHandle>> live;
    {
        std::lock_guard lk(mu_);
        live.swap(sessions_);
    }
    for (auto& [_, h] : live) h->stop();
}

std::filesystem::path SessionService::log_path(const SessionId& id) const { return config_.log_dir / (id + ".log"); }

SessionId SessionService::next_id() {
    for (;;) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "sess-%06llu", static_cast<unsigned long long>(++id_counter_));
        SessionId id = buf;
        if (sessions_.count(id)) continue;
        if (!config_.log_dir.empty() && std::filesystem::exists(log_path(id))) continue;
        return id;
    }
}

std::shared_ptr<SessionHandle> SessionService::make_handle(const SessionId& id, const ProvidersConfig& providers,
                                                           const ModeConfig& mode_config) {
    (void)mode_config;
    auto h = std::make_shared<SessionHandle>();
    h->id = id;
    if (config_.virtual_time) {
        auto clock = std::make_unique<ManualClock>();
        h->manual = clock.get();
        h->clock = std::move(clock);
        h->runner = std::make_unique<InlineRunner>();
    } else {
        h->clock = std::make_unique<SteadyClock>();
        SessionHandle* raw = h.get();
        h->runner = std::make_unique<AsyncRunner>([raw](Task t) { raw->post(std::move(t)); });
    }
    h->providers = ProviderRegistry::instance().build(providers);
    if (auto guarded = std::dynamic_pointer_cast<GuardedTts>(h->providers.tts)) {
        h->mock_tts = std::dynamic_pointer_cast<MockTts>(guarded->inner());
    }
    KeywordEngine::Options kopts;
    kopts.source = config_.keyword_source;
    kopts.seed = providers.llm.seed.value_or(7);
    h->keywords = std::make_shared<KeywordEngine>(stopwords_, lexicon_, templates_, kopts, h->providers.llm);
    h->suggestions = std::make_shared<SuggestionEngine>(templates_, h->providers.llm);
    return h;
}

namespace {

EngineDeps deps_for(SessionHandle& h, const ModeConfig& mode_config, const EngineOptions& options) {
    EngineDeps d;
    d.config = mode_config;
    d.keywords = h.keywords;
    d.suggestions = h.suggestions;
    d.tts = h.providers.tts;
    d.clock = h.clock.get();
    d.runner = h.runner.get();
    d.options = options;
    return d;
}

}  // namespace

SessionId SessionService::create_session(const nlohmann::json& overrides) {
    if (!overrides.is_object()) throw Error(ErrorCode::invalid_config, "session overrides must be an object");
    ModeConfig mode_config = config_.mode_config;
    Mode mode = config_.default_mode;
    ProvidersConfig providers = config_.providers;
    nlohmann::json rest = nlohmann::json::object();
    for (const auto& [key, value] : overrides.items()) {
        if (key == "mode") {
            auto m = value.is_string() ? parse_mode(value.get<std::string>()) : std::nullopt;
            if (!m) throw Error(ErrorCode::invalid_config, "unknown mode in overrides");
            mode = *m;
        } else if (key == "providers") {
            providers = ProvidersConfig::from_json(value);
        } else {
            rest[key] = value;
        }
    }
    mode_config = apply_overrides(mode_config, rest);

    std::lock_guard lk(mu_);
    const SessionId id = next_id();
    auto h = make_handle(id, providers, mode_config);
    if (!config_.log_dir.empty()) h->writer = std::make_unique<EventLogWriter>(log_path(id));
    SessionHandle* raw = h.get();
    h->engine = std::make_unique<SessionEngine>(id, deps_for(*h, mode_config, config_.engine),
                                                [raw](const ServerEvent& ev) { raw->publish(ev); }, mode);
    h->engine->start({{"providers", providers.to_json()}});
    h->start_worker();
    sessions_[id] = std::move(h);
    return id;
}

void SessionService::load_session(const SessionId& id) { find(id); }

std::shared_ptr<SessionHandle> SessionService::find(const SessionId& id) {
    std::lock_guard lk(mu_);
    if (auto it = sessions_.find(id); it != sessions_.end()) return it->second;
    // ids are generated, so anything else cannot name a file of ours
    const bool well_formed = id.rfind("sess-", 0) == 0 && id.size() > 5 &&
                             std::all_of(id.begin() + 5, id.end(), [](char c) { return c >= '0' && c <= '9'; });
    if (config_.log_dir.empty() || !well_formed || !std::filesystem::exists(log_path(id))) {
        throw Error(ErrorCode::session_not_found, "no session " + id);
    }
    auto log = read_event_log(log_path(id));
    if (log.empty()) throw CorruptLogError(0, "empty session log " + id);
    if (log.front().session_id != id) throw CorruptLogError(0, "log belongs to " + log.front().session_id);
    const nlohmann::json& created = log.front().payload;
    ProvidersConfig providers = created.contains("providers") ? ProvidersConfig::from_json(created["providers"])
                                                              : config_.providers;
    ModeConfig mode_config;
    try {
        mode_config = apply_overrides(ModeConfig{}, created.at("config"));
    } catch (const std::exception& e) {
        throw CorruptLogError(0, std::string("bad session config in log: ") + e.what());
    }
    auto h = make_handle(id, providers, mode_config);
    if (h->manual) {
        h->manual->set(log.back().ts);
    } else {
        h->clock = std::make_unique<SteadyClock>(log.back().ts);
    }
    SessionHandle* raw = h.get();
    h->engine = SessionEngine::restore(log, deps_for(*h, mode_config, config_.engine),
                                       [raw](const ServerEvent& ev) { raw->publish(ev); });
    h->events = std::move(log);
    h->writer = std::make_unique<EventLogWriter>(log_path(id));
    h->start_worker();
    sessions_[id] = h;
    return h;
}

bool SessionService::has_session(const SessionId& id) {
    try {
        find(id);
        return true;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::session_not_found) return false;
        throw;
    }
}

std::vector<SessionId> SessionService::sessions() const {
    std::lock_guard lk(mu_);
    std::vector<SessionId> out;
    for (const auto& [id, _] : sessions_) out.push_back(id);
    return out;
}

void SessionService::close_session(const SessionId& id) {
    std::shared_ptr<SessionHandle> h;
    {
        std::lock_guard lk(mu_);
        auto it = sessions_.find(id);
        if (it == sessions_.end()) throw Error(ErrorCode::session_not_found, "no session " + id);
        h = std::move(it->second);
        sessions_.erase(it);
    }
    h->stop();
}

Submission SessionService::submit(const SessionId& id, const nlohmann::json& command) {
    auto h = find(id);
    Command c = parse_command(command, id);
    c.session_id = id;
    return submit(std::move(c));
}

Submission SessionService::submit(Command command) {
    auto h = find(command.session_id);
    auto promise = std::make_shared<std::promise<CommandOutcome>>();
    Submission s;
    s.outcome = promise->get_future().share();
    s.ack_seq = h->last_seq();
    SessionHandle* raw = h.get();
    if (!h->post([raw, promise, command] { promise->set_value(raw->engine->apply(command)); })) {
        throw Error(ErrorCode::session_not_found, "session " + command.session_id + " is closed");
    }
    return s;
}

CommandOutcome SessionService::execute(const SessionId& id, const nlohmann::json& command) {
    return submit(id, command).outcome.get();
}

Subscription SessionService::subscribe(const SessionId& id, std::int64_t from_seq) {
    return Subscription(find(id), from_seq);
}

std::vector<ServerEvent> SessionService::events(const SessionId& id, std::int64_t from_seq) {
    auto h = find(id);
    std::lock_guard lk(h->ev_mu);
    const auto start = static_cast<std::size_t>(std::clamp<std::int64_t>(from_seq, 0, static_cast<std::int64_t>(h->events.size())));
    return {h->events.begin() + static_cast<std::ptrdiff_t>(start), h->events.end()};
}

nlohmann::json SessionService::snapshot(const SessionId& id) {
    auto h = find(id);
    SessionHandle* raw = h.get();
    return h->call([raw] { return raw->engine->snapshot(); });
}

std::vector<MockTts::Entry> SessionService::tts_entries(const SessionId& id) {
    auto h = find(id);
    return h->mock_tts ? h->mock_tts->entries() : std::vector<MockTts::Entry>{};
}

void SessionService::attach_asr(const SessionId& id, const std::string& source) {
    auto h = find(id);
    h->attach_asr(h->providers.asr->open(source));
}

void SessionService::advance_time(const SessionId& id, Millis delta) {
    auto h = find(id);
    if (!h->manual) throw Error(ErrorCode::precondition, "advance_time needs a virtual-time session");
    if (delta < 0) throw Error(ErrorCode::precondition, "time cannot go backwards");
    SessionHandle* raw = h.get();
    h->call([raw, delta] {
        const Millis target = raw->manual->now_ms() + delta;
        for (auto d = raw->engine->next_deadline(); d && *d <= target; d = raw->engine->next_deadline()) {
            raw->manual->set(std::max(*d, raw->manual->now_ms()));
            raw->engine->poll();
        }
        raw->manual->set(target);
    });
}

// ---------------------------------------------------------------- replay

ReplayResult replay_script(SessionService& service, const SessionId& id, const std::vector<ScriptLine>& script) {
    if (!service.config().virtual_time) throw Error(ErrorCode::precondition, "replay needs a virtual-time service");
    ReplayResult r;
    r.session_id = id;
    ScriptedAsr asr;
    auto stream = asr.open_lines(script);
    for (const auto& line : script) {
        service.advance_time(id, line.delay_ms);
        CommandOutcome out;
        if (line.is_command) {
            try {
                out = service.execute(id, line.command);
            } catch (const Error&) {
                ++r.rejected_commands;
                continue;
            }
        } else {
            auto ev = stream->next();
            if (!ev || !ev->is_final) continue;
            out = service.execute(id, {{"kind", "ingest_text"},
                                       {"payload", {{"speaker", to_string(ev->speaker.value_or(Speaker::partner))},
                                                    {"text", ev->text}}},
                                       {"client_ts", ev->timestamp}});
        }
        if (!out.ok) ++r.rejected_commands;
    }
    // let a pending debounce fire so the log ends settled
    service.advance_time(id, service.config().engine.debounce_ms);
    r.events = service.events(id);
    for (const auto& ev : r.events) r.log_text += encode_log_record(ev);
    r.snapshot = service.snapshot(id);
    r.tts = service.tts_entries(id);
    return r;
}

ReplayResult run_replay(const std::vector<ScriptLine>& script, ServiceConfig config, const nlohmann::json& overrides) {
    config.virtual_time = true;
    SessionService service(std::move(config));
    const SessionId id = service.create_session(overrides);
    ReplayResult r = replay_script(service, id, script);
    service.close_session(id);
    return r;
}

}  // namespace quip
