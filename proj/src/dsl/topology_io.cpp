#include "mk2/dsl/topology_io.hpp"

#include <nlohmann/json.hpp>

namespace mk2::dsl {

using scj::Behaviour;
using scj::HandlerKind;
using scj::MissionNode;
using scj::SchedulableNode;
using scj::SequencerNode;
using scj::Topology;

namespace {

// --- keyword tree format -------------------------------------------------------

class TopoParser {
  public:
    explicit TopoParser(const ModelSource& src) : tokens_(lex(src)) {}

    Topology run() {
        expect_ident("topo");
        auto ver = expect(Token::Kind::Int);
        if (ver.int_value != 1) throw ParseError("unsupported topo version", ver.span);
        Topology t;
        expect_ident("sequencer");
        t.root = parse_sequencer_body();
        if (peek().kind != Token::Kind::End)
            throw ParseError("trailing input after top-level sequencer", peek().span);
        t.validate();
        return t;
    }

  private:
    const Token& peek(std::size_t ahead = 0) const {
        return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
    }
    const Token& next() { return tokens_[std::min(pos_++, tokens_.size() - 1)]; }
    Token expect(Token::Kind kind) {
        const Token& t = next();
        if (t.kind != kind) throw ParseError("unexpected token '" + t.text + "'", t.span);
        return t;
    }
    Token expect_punct(const char* p) {
        const Token& t = next();
        if (!t.is(p)) throw ParseError("expected '" + std::string(p) + "'", t.span);
        return t;
    }
    void expect_ident(const char* w) {
        const Token& t = next();
        if (!t.is_ident(w)) throw ParseError("expected '" + std::string(w) + "'", t.span);
    }
    bool accept_ident(const char* w) {
        if (peek().is_ident(w)) {
            ++pos_;
            return true;
        }
        return false;
    }

    SequencerNode parse_sequencer_body() {
        SequencerNode s;
        s.id = expect(Token::Kind::Ident).text;
        expect_punct("{");
        while (!peek().is("}")) {
            expect_ident("mission");
            s.missions.push_back(parse_mission());
        }
        expect_punct("}");
        return s;
    }

    MissionNode parse_mission() {
        MissionNode m;
        m.id = expect(Token::Kind::Ident).text;
        expect_punct("{");
        while (!peek().is("}")) {
            if (accept_ident("buffer")) {
                m.buffers.push_back(expect(Token::Kind::Ident).text);
            } else if (accept_ident("thread")) {
                SchedulableNode n;
                n.kind = SchedulableNode::Kind::Thread;
                n.id = expect(Token::Kind::Ident).text;
                n.behaviour = parse_behaviour();
                m.schedulables.push_back(std::move(n));
            } else if (accept_ident("handler")) {
                SchedulableNode n;
                n.kind = SchedulableNode::Kind::Handler;
                n.id = expect(Token::Kind::Ident).text;
                expect_ident("kind");
                expect_punct("=");
                Token k = expect(Token::Kind::Ident);
                n.handler_kind = handler_kind(k);
                n.behaviour = parse_behaviour();
                m.schedulables.push_back(std::move(n));
            } else if (accept_ident("sequencer")) {
                SchedulableNode n;
                n.kind = SchedulableNode::Kind::NestedSequencer;
                n.nested = std::make_shared<SequencerNode>(parse_sequencer_body());
                n.id = n.nested->id;
                m.schedulables.push_back(std::move(n));
            } else {
                throw ParseError("expected a mission entry", peek().span);
            }
        }
        expect_punct("}");
        return m;
    }

    static HandlerKind handler_kind(const Token& t) {
        if (t.text == "periodic") return HandlerKind::Periodic;
        if (t.text == "aperiodic") return HandlerKind::Aperiodic;
        if (t.text == "oneshot" || t.text == "oneShot") return HandlerKind::OneShot;
        throw ParseError("unknown handler kind '" + t.text + "'", t.span);
    }

    Behaviour parse_behaviour() {
        expect_punct("{");
        Behaviour b;
        Token head = expect(Token::Kind::Ident);
        if (head.text == "workloop") {
            b.kind = Behaviour::Kind::WorkLoop;
            while (!peek().is("}")) {
                Token key = expect(Token::Kind::Ident);
                expect_punct("=");
                if (key.text == "steps") {
                    b.steps = static_cast<int>(expect(Token::Kind::Int).int_value);
                } else if (key.text == "checks_termination") {
                    Token v = expect(Token::Kind::Ident);
                    b.checks_termination = v.text == "true";
                } else {
                    throw ParseError("unknown workloop attribute '" + key.text + "'", key.span);
                }
            }
        } else if (head.text == "terminator") {
            b.kind = Behaviour::Kind::Terminator;
            while (!peek().is("}")) {
                Token key = expect(Token::Kind::Ident);
                expect_punct("=");
                if (key.text == "target") {
                    b.target_sequencer = expect(Token::Kind::Ident).text;
                } else if (key.text == "stop_sequence") {
                    b.stops_sequence = expect(Token::Kind::Ident).text == "true";
                } else {
                    throw ParseError("unknown terminator attribute '" + key.text + "'", key.span);
                }
            }
        } else if (head.text == "producer" || head.text == "consumer") {
            b.kind = head.text == "producer" ? Behaviour::Kind::Producer
                                             : Behaviour::Kind::Consumer;
            expect_ident("buffer");
            expect_punct("=");
            b.buffer = expect(Token::Kind::Ident).text;
        } else {
            throw ParseError("unknown behaviour '" + head.text + "'", head.span);
        }
        expect_punct("}");
        return b;
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

// --- JSON encoding ---------------------------------------------------------------

using nlohmann::json;

Behaviour behaviour_from_json(const json& j) {
    Behaviour b;
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "workloop") {
        b.kind = Behaviour::Kind::WorkLoop;
        b.steps = j.value("steps", 1);
        b.checks_termination = j.value("checks_termination", false);
    } else if (kind == "terminator") {
        b.kind = Behaviour::Kind::Terminator;
        b.target_sequencer = j.value("target", std::string());
        b.stops_sequence = j.value("stop_sequence", false);
    } else if (kind == "producer" || kind == "consumer") {
        b.kind = kind == "producer" ? Behaviour::Kind::Producer : Behaviour::Kind::Consumer;
        b.buffer = j.at("buffer").get<std::string>();
    } else {
        throw ParseError("unknown behaviour kind '" + kind + "' in topology JSON");
    }
    return b;
}

SequencerNode sequencer_from_json(const json& j);

MissionNode mission_from_json(const json& j) {
    MissionNode m;
    m.id = j.at("id").get<std::string>();
    if (j.contains("buffers"))
        for (const auto& b : j.at("buffers")) m.buffers.push_back(b.get<std::string>());
    if (j.contains("schedulables")) {
        for (const auto& s : j.at("schedulables")) {
            SchedulableNode n;
            std::string kind = s.at("kind").get<std::string>();
            if (kind == "thread") {
                n.kind = SchedulableNode::Kind::Thread;
                n.id = s.at("id").get<std::string>();
                n.behaviour = behaviour_from_json(s.at("behaviour"));
            } else if (kind == "handler") {
                n.kind = SchedulableNode::Kind::Handler;
                n.id = s.at("id").get<std::string>();
                std::string hk = s.value("handler_kind", "periodic");
                if (hk == "periodic") n.handler_kind = HandlerKind::Periodic;
                else if (hk == "aperiodic") n.handler_kind = HandlerKind::Aperiodic;
                else if (hk == "oneshot") n.handler_kind = HandlerKind::OneShot;
                else throw ParseError("unknown handler kind '" + hk + "' in topology JSON");
                n.behaviour = behaviour_from_json(s.at("behaviour"));
            } else if (kind == "sequencer") {
                n.kind = SchedulableNode::Kind::NestedSequencer;
                n.nested = std::make_shared<SequencerNode>(sequencer_from_json(s));
                n.id = n.nested->id;
            } else {
                throw ParseError("unknown schedulable kind '" + kind + "' in topology JSON");
            }
            m.schedulables.push_back(std::move(n));
        }
    }
    return m;
}

SequencerNode sequencer_from_json(const json& j) {
    SequencerNode s;
    s.id = j.at("id").get<std::string>();
    if (j.contains("missions"))
        for (const auto& m : j.at("missions")) s.missions.push_back(mission_from_json(m));
    return s;
}

Topology topology_from_json(const ModelSource& src) {
    json j;
    try {
        j = json::parse(src.text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid topology JSON: ") + e.what());
    }
    try {
        if (j.value("topo", 1) != 1) throw ParseError("unsupported topo version");
        Topology t;
        t.name = j.value("name", std::string("topology"));
        t.root = sequencer_from_json(j.at("root"));
        t.validate();
        return t;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed topology JSON: ") + e.what());
    }
}

} // namespace

Topology parse_topology(const ModelSource& src) {
    for (char c : src.text) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        if (c == '{') return topology_from_json(src);
        break;
    }
    return TopoParser(src).run();
}

} // namespace mk2::dsl
