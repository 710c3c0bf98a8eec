"""Independent reference implementations used as test oracles.

Polynomials are handled as lists of (coefficient, word) where a word is the
sequence of variable indices in the order they were written.  Normalization
is a plain bubble sort that flips the sign on every swap of two odd symbols.
"""
from fractions import Fraction

from pnrec.graded import Polynomial


def sort_word(word, odd):
    """(sorted word, sign); sign 0 when an odd symbol repeats."""
    w = list(word)
    sign = 1
    for i in range(len(w)):
        for j in range(len(w) - 1 - i):
            if w[j] > w[j + 1]:
                if odd[w[j]] and odd[w[j + 1]]:
                    sign = -sign
                w[j], w[j + 1] = w[j + 1], w[j]
    for a, b in zip(w, w[1:]):
        if a == b and odd[a]:
            return tuple(w), 0
    return tuple(w), sign


def word_to_mono(word):
    out = []
    for v in word:
        if out and out[-1][0] == v:
            out[-1] = (v, out[-1][1] + 1)
        else:
            out.append((v, 1))
    return tuple(out)


def mono_to_word(mono):
    return [v for v, e in mono for _ in range(e)]


def from_words(table, items):
    odd = table.odd_mask
    acc = {}
    for c, word in items:
        w, s = sort_word(word, odd)
        if s:
            m = word_to_mono(w)
            acc[m] = acc.get(m, 0) + s * Fraction(c)
    return Polynomial(table, acc)


def words_of(f):
    return [(c, mono_to_word(m)) for m, c in f.terms.items()]


def product(f, g):
    """Product by concatenating words and re-sorting."""
    return from_words(f.table, [(a * b, wa + wb) for a, wa in words_of(f) for b, wb in words_of(g)])


def left_derivative(f, name):
    """Strip each occurrence of the variable, signed by the odd symbols before it."""
    t = f.table
    idx = t.index(name)
    odd = t.odd_mask
    items = []
    for c, word in words_of(f):
        for pos, v in enumerate(word):
            if v != idx:
                continue
            before = sum(odd[w] for w in word[:pos])
            s = -1 if (odd[idx] and before % 2) else 1
            items.append((s * c, word[:pos] + word[pos + 1:]))
            if odd[idx]:
                break
    return from_words(t, items)


def matrix_mul(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))]
            for i in range(len(a))]


def transpose(a):
    return [list(r) for r in zip(*a)]


def two_dim_bracket(Bxy, f, g, x, y):
    """``{f,g}`` for the constant bivector with ``B^{xy} = Bxy`` on even (x, y)."""
    return (f.diff(x) * g.diff(y) - f.diff(y) * g.diff(x)) * Bxy
