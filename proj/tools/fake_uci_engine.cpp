// Deterministic stand-in for a UCI engine, used by tests and mock-mode runs.
//
// Default mode: engine::MaterialEngine's one-ply search behind the UCI protocol.
//
// --script FILE: replays a canned transcript instead. The file is a list of
// blocks; "> prefix" starts a block that fires for every command beginning
// with `prefix`, and the following lines are printed verbatim. "@exit"
// terminates the process (crash simulation) and "@sleep N" pauses N ms.
//
// --log FILE appends every received command to FILE.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "llmchess/chess/board.hpp"
#include "llmchess/chess/movegen.hpp"
#include "llmchess/engine/material.hpp"

using namespace llmchess::chess;

namespace {

struct ScriptBlock {
    std::string trigger;
    std::vector<std::string> lines;
};

std::vector<ScriptBlock> load_script(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "fake_uci_engine: cannot open script " << path << "\n";
        std::exit(3);
    }
    std::vector<ScriptBlock> blocks;
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("> ", 0) == 0) {
            blocks.push_back({line.substr(2), {}});
        } else if (!blocks.empty() && line.rfind("#", 0) != 0) {
            blocks.back().lines.push_back(line);
        }
    }
    return blocks;
}

void run_script(const std::vector<ScriptBlock>& blocks, std::ofstream* log) {
    std::string cmd;
    while (std::getline(std::cin, cmd)) {
        if (log) *log << cmd << std::endl;
        if (cmd == "quit") return;
        for (const auto& block : blocks) {
            if (cmd.rfind(block.trigger, 0) != 0) continue;
            for (const auto& out : block.lines) {
                if (out == "@exit") std::_Exit(1);
                if (out.rfind("@sleep ", 0) == 0) {
                    std::this_thread::sleep_for(std::chrono::milliseconds(std::atoi(out.c_str() + 7)));
                    continue;
                }
                std::cout << out << "\n";
            }
            std::cout.flush();
            break;
        }
    }
}

Board parse_position(const std::string& cmd) {
    // "position startpos [moves ...]" or "position fen <6 fields> [moves ...]"
    Board b;
    std::size_t moves_at = cmd.find(" moves ");
    std::string head = cmd.substr(0, moves_at);
    if (head.rfind("position startpos", 0) == 0) {
        b = Board::initial();
    } else {
        b = Board::from_fen(head.substr(std::string("position fen ").size()));
    }
    if (moves_at != std::string::npos) {
        std::string rest = cmd.substr(moves_at + 7);
        std::size_t i = 0;
        while (i < rest.size()) {
            std::size_t j = rest.find(' ', i);
            if (j == std::string::npos) j = rest.size();
            auto m = find_uci_move(b, rest.substr(i, j - i));
            if (!m) throw ChessError("illegal move in position command");
            b = apply_unchecked(b, *m);
            i = j + 1;
        }
    }
    return b;
}

void run_engine(std::ofstream* log) {
    Board board = Board::initial();
    int multipv = 1;
    std::string cmd;
    while (std::getline(std::cin, cmd)) {
        if (log) *log << cmd << std::endl;
        if (cmd == "uci") {
            std::cout << "id name FakeMaterial 1.0\n"
                      << "id author llmchess\n"
                      << "option name Hash type spin default 16 min 1 max 1024\n"
                      << "option name MultiPV type spin default 1 min 1 max 500\n"
                      << "uciok" << std::endl;
        } else if (cmd == "isready") {
            std::cout << "readyok" << std::endl;
        } else if (cmd.rfind("setoption name ", 0) == 0) {
            const std::string rest = cmd.substr(15);
            const auto value_at = rest.find(" value ");
            const std::string name = rest.substr(0, value_at);
            if (name == "MultiPV" && value_at != std::string::npos) {
                multipv = std::max(1, std::atoi(rest.c_str() + value_at + 7));
            } else if (name != "Hash") {
                std::cout << "No such option: " << name << std::endl;
            }
        } else if (cmd.rfind("position ", 0) == 0) {
            try {
                board = parse_position(cmd);
            } catch (const std::exception& e) {
                std::cout << "info string bad position: " << e.what() << std::endl;
            }
        } else if (cmd.rfind("go", 0) == 0) {
            const auto ranked = llmchess::engine::MaterialEngine::rank_all(board);
            if (ranked.empty()) {
                std::cout << "info depth 0 score " << (in_check(board) ? "mate 0" : "cp 0") << "\n"
                          << "bestmove (none)" << std::endl;
                continue;
            }
            const int lines = std::min<int>(multipv, static_cast<int>(ranked.size()));
            for (int i = 0; i < lines; ++i) {
                const auto& s = ranked[i];
                const bool mate = s.score.kind == llmchess::engine::EvalScore::Kind::Mate;
                std::cout << "info depth 1 seldepth 1 multipv " << (i + 1) << " score "
                          << (mate ? "mate 1" : "cp " + std::to_string(s.score.value)) << " nodes " << ranked.size()
                          << " pv " << s.move.uci() << "\n";
            }
            std::cout << "bestmove " << ranked.front().move.uci() << std::endl;
        } else if (cmd == "quit") {
            return;
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    std::string script, log_path;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--script" && i + 1 < argc) {
            script = argv[++i];
        } else if (arg == "--log" && i + 1 < argc) {
            log_path = argv[++i];
        } else {
            std::cerr << "usage: fake_uci_engine [--script FILE] [--log FILE]\n";
            return 1;
        }
    }
    std::ofstream log;
    if (!log_path.empty()) log.open(log_path, std::ios::app);
    std::ofstream* log_ptr = log.is_open() ? &log : nullptr;
    if (!script.empty())
        run_script(load_script(script), log_ptr);
    else
        run_engine(log_ptr);
    return 0;
}
