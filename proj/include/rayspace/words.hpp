#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rayspace/errors.hpp"
#include "rayspace/moebius.hpp"

namespace rayspace {

/// A letter is +-(k+1) for generator k or its inverse; a word is a sequence
/// of letters. Words print as letter strings with uppercase for inverses:
/// "a", "A", "b", "B", ...
using Letter = std::int8_t;
using Word = std::vector<Letter>;

inline Letter letter_inverse(Letter l) { return static_cast<Letter>(-l); }

inline Word reduce(const Word& w) {
    Word out;
    out.reserve(w.size());
    for (Letter l : w) {
        check(l != 0, "zero letter");
        if (!out.empty() && out.back() == -l)
            out.pop_back();
        else
            out.push_back(l);
    }
    return out;
}

inline Word concat(const Word& u, const Word& v) {
    Word w = u;
    w.insert(w.end(), v.begin(), v.end());
    return reduce(w);
}

inline Word inverse(const Word& w) {
    Word out;
    out.reserve(w.size());
    for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back(-*it);
    return out;
}

inline bool is_reduced(const Word& w) {
    for (size_t i = 0; i + 1 < w.size(); ++i)
        if (w[i] == -w[i + 1]) return false;
    return true;
}

/// Conjugacy representative: cyclically reduce, then take the
/// lexicographically least rotation.
inline Word cyclic_reduce(const Word& w0) {
    Word w = reduce(w0);
    size_t i = 0, j = w.size();
    while (j - i >= 2 && w[i] == -w[j - 1]) {
        ++i;
        --j;
    }
    return Word(w.begin() + i, w.begin() + j);
}

inline Word conjugacy_key(const Word& w0) {
    Word w = cyclic_reduce(w0);
    if (w.empty()) return w;
    Word best = w;
    for (size_t r = 1; r < w.size(); ++r) {
        Word rot(w.begin() + r, w.end());
        rot.insert(rot.end(), w.begin(), w.begin() + r);
        if (rot < best) best = rot;
    }
    return best;
}

/// Applies an endomorphism datum (image word per generator) to a word.
inline Word substitute(const Word& w, const std::vector<Word>& images) {
    Word out;
    for (Letter l : w) {
        size_t k = static_cast<size_t>((l > 0 ? l : -l) - 1);
        check(k < images.size(), "letter outside generator range");
        if (l > 0)
            out.insert(out.end(), images[k].begin(), images[k].end());
        else {
            Word inv = inverse(images[k]);
            out.insert(out.end(), inv.begin(), inv.end());
        }
    }
    return reduce(out);
}

inline MoebiusMap evaluate(const Word& w, const std::vector<MoebiusMap>& gens) {
    MoebiusMap m;
    for (Letter l : w) {
        size_t k = static_cast<size_t>((l > 0 ? l : -l) - 1);
        check(k < gens.size(), "letter outside generator range");
        m = m * (l > 0 ? gens[k] : gens[k].inverse());
    }
    return m;
}

inline std::string word_str(const Word& w) {
    if (w.empty()) return "1";
    std::string s;
    for (Letter l : w) {
        char base = static_cast<char>('a' + ((l > 0 ? l : -l) - 1));
        s += (l > 0) ? base : static_cast<char>(std::toupper(base));
    }
    return s;
}

inline Word parse_word(const std::string& s) {
    Word w;
    if (s == "1" || s.empty()) return w;
    for (char c : s) {
        if (std::islower(static_cast<unsigned char>(c)))
            w.push_back(static_cast<Letter>(c - 'a' + 1));
        else if (std::isupper(static_cast<unsigned char>(c)))
            w.push_back(static_cast<Letter>(-(c - 'A' + 1)));
        else
            throw Error(std::string("bad word literal: ") + s);
    }
    return w;
}

/// Exponent sums per generator (abelianized image).
inline std::vector<long> abelianization(const Word& w, size_t ngens) {
    std::vector<long> e(ngens, 0);
    for (Letter l : w) {
        size_t k = static_cast<size_t>((l > 0 ? l : -l) - 1);
        check(k < ngens, "letter outside generator range");
        e[k] += (l > 0) ? 1 : -1;
    }
    return e;
}

}  // namespace rayspace
