#include <cctype>
#include <string>
#include <vector>

#include "gibbsnet/descriptors.hpp"
#include "gibbsnet/error.hpp"

namespace gibbsnet {
namespace {

bool is_bond(char c) {
    switch (c) {
        case '-':
        case '=':
        case '#':
        case '$':
        case ':':
        case '/':
        case '\\':
        case '.':
            return true;
        default:
            return false;
    }
}

[[noreturn]] void fail(const std::string& msg, std::size_t offset) {
    throw ParseError("SMILES parse error at byte " + std::to_string(offset) + ": " + msg, offset);
}

// Bracket atom body: [isotope] symbol [chirality] [Hn] [charge] [:class]
SmilesToken parse_bracket(std::string_view s, std::size_t open) {
    const std::size_t close = s.find(']', open + 1);
    if (close == std::string_view::npos) {
        fail("unterminated bracket atom", open);
    }
    const std::string_view body = s.substr(open + 1, close - open - 1);
    if (body.find('[') != std::string_view::npos) {
        fail("nested '[' inside bracket atom", open);
    }
    SmilesToken tok{TokenKind::bracket_atom, std::string(s.substr(open, close - open + 1)), open};

    std::size_t i = 0;
    while (i < body.size() && std::isdigit(static_cast<unsigned char>(body[i]))) {
        tok.isotope = tok.isotope * 10 + (body[i] - '0');
        ++i;
    }
    if (i >= body.size() || !(std::isalpha(static_cast<unsigned char>(body[i])) || body[i] == '*')) {
        fail("bracket atom without element symbol", open + 1 + i);
    }
    tok.aromatic = std::islower(static_cast<unsigned char>(body[i])) != 0;
    ++i;
    while (i < body.size() && std::islower(static_cast<unsigned char>(body[i]))) {
        ++i;
    }
    while (i < body.size() && body[i] == '@') {
        ++i;
    }
    // Anything else in the chirality class (TH1, AL2, ...) is letters+digits.
    while (i < body.size() && std::isupper(static_cast<unsigned char>(body[i])) && body[i] != 'H') {
        ++i;
        while (i < body.size() && std::isdigit(static_cast<unsigned char>(body[i]))) {
            ++i;
        }
    }
    if (i < body.size() && body[i] == 'H') {
        ++i;
        while (i < body.size() && std::isdigit(static_cast<unsigned char>(body[i]))) {
            ++i;
        }
    }
    if (i < body.size() && (body[i] == '+' || body[i] == '-')) {
        const char sign_char = body[i];
        const int sign = sign_char == '+' ? 1 : -1;
        int magnitude = 0;
        ++i;
        if (i < body.size() && std::isdigit(static_cast<unsigned char>(body[i]))) {
            while (i < body.size() && std::isdigit(static_cast<unsigned char>(body[i]))) {
                magnitude = magnitude * 10 + (body[i] - '0');
                ++i;
            }
        } else {
            magnitude = 1;
            while (i < body.size() && body[i] == sign_char) {
                ++magnitude;
                ++i;
            }
        }
        tok.charge = sign * magnitude;
    }
    if (i < body.size() && body[i] == ':') {
        ++i;
        while (i < body.size() && std::isdigit(static_cast<unsigned char>(body[i]))) {
            ++i;
        }
    }
    if (i != body.size()) {
        fail(std::string("unexpected character '") + body[i] + "' in bracket atom", open + 1 + i);
    }
    return tok;
}

}  // namespace

std::vector<SmilesToken> tokenize_smiles(std::string_view s) {
    if (s.empty()) {
        throw ParseError("SMILES parse error at byte 0: empty string", 0);
    }
    std::vector<SmilesToken> out;
    std::vector<std::size_t> open_branches;
    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        if (static_cast<unsigned char>(c) >= 0x80) {
            fail("non-ASCII byte", i);
        }
        if (c == '[') {
            out.push_back(parse_bracket(s, i));
            i += out.back().text.size();
            continue;
        }
        if (c == ']') {
            fail("unmatched ']'", i);
        }
        if (c == '(') {
            open_branches.push_back(i);
            out.push_back({TokenKind::branch_open, "(", i});
            ++i;
            continue;
        }
        if (c == ')') {
            if (open_branches.empty()) {
                fail("unmatched ')'", i);
            }
            open_branches.pop_back();
            out.push_back({TokenKind::branch_close, ")", i});
            ++i;
            continue;
        }
        if (is_bond(c)) {
            out.push_back({TokenKind::bond, std::string(1, c), i});
            ++i;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            out.push_back({TokenKind::ring_closure, std::string(1, c), i});
            ++i;
            continue;
        }
        if (c == '%') {
            if (i + 2 >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i + 1])) ||
                !std::isdigit(static_cast<unsigned char>(s[i + 2]))) {
                fail("'%' must be followed by two digits", i);
            }
            out.push_back({TokenKind::ring_closure, std::string(s.substr(i, 3)), i});
            i += 3;
            continue;
        }
        // Two-letter organic symbols take precedence.
        if (c == 'C' && i + 1 < s.size() && s[i + 1] == 'l') {
            out.push_back({TokenKind::atom, "Cl", i});
            i += 2;
            continue;
        }
        if (c == 'B' && i + 1 < s.size() && s[i + 1] == 'r') {
            out.push_back({TokenKind::atom, "Br", i});
            i += 2;
            continue;
        }
        switch (c) {
            case 'B':
            case 'C':
            case 'N':
            case 'O':
            case 'P':
            case 'S':
            case 'F':
            case 'I':
            case '*':
                out.push_back({TokenKind::atom, std::string(1, c), i});
                break;
            case 'b':
            case 'c':
            case 'n':
            case 'o':
            case 'p':
            case 's': {
                SmilesToken t{TokenKind::atom, std::string(1, c), i};
                t.aromatic = true;
                out.push_back(t);
                break;
            }
            default:
                fail(std::string("unknown character '") + c + "'", i);
        }
        ++i;
    }
    if (!open_branches.empty()) {
        fail("unbalanced '('", open_branches.back());
    }
    return out;
}

}  // namespace gibbsnet
