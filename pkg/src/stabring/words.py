"""Free-group words over 2n letters, the boundary word, and its exact stabilizers.

Words are tuples of nonzero signed integers: letter k stands for the k-th
generator, -k for its inverse.  Generator 2i-1 plays the a_i role of handle i,
generator 2i the b_i role.  All words are kept freely reduced.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .groups import FiniteGroup


class WordError(ValueError):
    """Raised on malformed words or non-stabilizing automorphisms."""


def reduce_word(letters) -> tuple:
    """Freely reduce to the unique normal form (cancel adjacent x x^-1)."""
    out = []
    for l in letters:
        if l == 0:
            raise WordError("letter 0 is not a generator")
        if out and out[-1] == -l:
            out.pop()
        else:
            out.append(l)
    return tuple(out)


def invert_word(w) -> tuple:
    return tuple(-l for l in reversed(w))


def commutator_word(u, v) -> tuple:
    return reduce_word(tuple(u) + tuple(v) + invert_word(u) + invert_word(v))


def boundary_word(n: int) -> tuple:
    """W = [x1, x2][x3, x4]...[x_{2n-1}, x_{2n}], reduced, length 4n."""
    if n < 1:
        raise WordError("boundary word needs genus n >= 1")
    w = []
    for i in range(1, n + 1):
        a, b = 2 * i - 1, 2 * i
        w += [a, b, -a, -b]
    return tuple(w)


def apply_images(images, w) -> tuple:
    """Substitute each letter of w by its image word, freely reducing."""
    out = []
    for l in w:
        img = images[l - 1] if l > 0 else invert_word(images[-l - 1])
        for m in img:
            if out and out[-1] == -m:
                out.pop()
            else:
                out.append(m)
    return tuple(out)


def compose_images(outer, inner) -> tuple:
    """Images of (outer o inner): apply outer to each image word of inner."""
    return tuple(apply_images(outer, w) for w in inner)


def identity_images(n: int) -> tuple:
    return tuple((k,) for k in range(1, 2 * n + 1))


@dataclass(frozen=True)
class MarkedAutomorphism:
    """An automorphism of the rank-2n free group fixing the boundary word exactly."""

    n: int
    images: tuple
    inverse_images: tuple
    provenance: str

    def apply(self, w) -> tuple:
        return apply_images(self.images, w)

    def __post_init__(self):
        W = boundary_word(self.n)
        if apply_images(self.images, W) != W:
            raise WordError(f"{self.provenance}: does not fix the boundary word")
        ident = identity_images(self.n)
        if compose_images(self.images, self.inverse_images) != ident:
            raise WordError(f"{self.provenance}: inverse images do not invert it")
        if compose_images(self.inverse_images, self.images) != ident:
            raise WordError(f"{self.provenance}: images do not invert the inverse")


def _with_image(n: int, repl: dict) -> tuple:
    imgs = list(identity_images(n))
    for gen, w in repl.items():
        imgs[gen - 1] = reduce_word(w)
    return tuple(imgs)


def _named_moves(n: int) -> list:
    """Handle twists T1_i, T2_i, adjacent swaps S_i, and their inverses."""
    moves = []
    for i in range(1, n + 1):
        a, b = 2 * i - 1, 2 * i
        moves.append((f"T1_{i}", _with_image(n, {a: (a, b)}), _with_image(n, {a: (a, -b)})))
        moves.append((f"T1_{i}_inv", _with_image(n, {a: (a, -b)}), _with_image(n, {a: (a, b)})))
        moves.append((f"T2_{i}", _with_image(n, {b: (b, a)}), _with_image(n, {b: (b, -a)})))
        moves.append((f"T2_{i}_inv", _with_image(n, {b: (b, -a)}), _with_image(n, {b: (b, a)})))
    for i in range(1, n):
        a, b = 2 * i - 1, 2 * i
        c, d = 2 * i + 1, 2 * i + 2
        conj = commutator_word((c,), (d,))       # [a_{i+1}, b_{i+1}]
        conj_prev = commutator_word((a,), (b,))  # [a_i, b_i]
        fwd = _with_image(n, {
            a: (c,), b: (d,),
            c: invert_word(conj) + (a,) + conj,
            d: invert_word(conj) + (b,) + conj,
        })
        bwd = _with_image(n, {
            a: conj_prev + (c,) + invert_word(conj_prev),
            b: conj_prev + (d,) + invert_word(conj_prev),
            c: (a,), d: (b,),
        })
        moves.append((f"S_{i}", fwd, bwd))
        moves.append((f"S_{i}_inv", bwd, fwd))
    return moves


def _whitehead_images(n: int, v: int, cut: frozenset) -> tuple:
    """Type-II Whitehead move: multiplier letter v, cut set of signed letters."""
    imgs = []
    for g in range(1, 2 * n + 1):
        if g == abs(v):
            imgs.append((g,))
            continue
        w = []
        if -g in cut:
            w.append(-v)
        w.append(g)
        if g in cut:
            w.append(v)
        imgs.append(reduce_word(w))
    return tuple(imgs)


def _whitehead_inverse_key(v: int, cut: frozenset) -> tuple:
    return -v, (cut - {v}) | {-v}


def _iter_whitehead_keys(n: int):
    """All (v, cut) with v in cut, -v not in cut, deterministic order."""
    letters = [l for g in range(1, 2 * n + 1) for l in (g, -g)]
    for v in letters:
        others = [l for l in letters if abs(l) != abs(v)]
        for mask in range(1 << len(others)):
            cut = {v}
            m = mask
            i = 0
            while m:
                if m & 1:
                    cut.add(others[i])
                m >>= 1
                i += 1
            yield v, frozenset(cut)


def _apply_whitehead_to_word(n: int, v: int, cut: frozenset, w) -> tuple:
    """phi(w) for the type-II move, without materializing all images."""
    gv = abs(v)
    out = []

    def push(m):
        if out and out[-1] == -m:
            out.pop()
        else:
            out.append(m)

    for l in w:
        g = abs(l)
        if g == gv:
            push(l)
        elif l > 0:
            if -l in cut:
                push(-v)
            push(l)
            if l in cut:
                push(v)
        else:
            if g in cut:
                push(-v)
            push(l)
            if -g in cut:
                push(v)
    return tuple(out)


def _solve_signed_perm(src, dst, n: int):
    """Signed permutation sigma with sigma(src) = dst positionally, or None."""
    if len(src) != len(dst):
        return None
    img = {}
    for a, b in zip(src, dst):
        g, s = abs(a), (1 if a > 0 else -1)
        want = b * s
        if img.setdefault(g, want) != want:
            return None
    if len(img) < 2 * n:
        return None  # every generator occurs in the boundary word, so this is total
    if len({abs(t) for t in img.values()}) != 2 * n:
        return None
    return tuple((img[g],) for g in range(1, 2 * n + 1))


def _signed_perm_inverse(images) -> tuple:
    inv = [None] * len(images)
    for g, (t,) in enumerate(images, start=1):
        if t > 0:
            inv[t - 1] = (g,)
        else:
            inv[-t - 1] = (-g,)
    return tuple(inv)


@lru_cache(maxsize=None)
def enumerate_stabilizing_automorphisms(n: int, depth: int = 1) -> tuple:
    """Named handle moves plus every Whitehead automorphism (and, at depth 2,
    every composite of two Whitehead automorphisms) fixing the boundary word
    exactly, deduplicated by image tuple.

    A type-I (signed permutation) automorphism maps the reduced boundary word
    to a reduced word positionally, so the identity is the only one fixing it;
    the search space is type-II moves and, at depth 2, composites with at most
    one type-I factor solved positionally.
    """
    if n < 1:
        raise WordError("genus must be >= 1")
    if depth not in (1, 2):
        raise WordError("search depth must be 1 or 2")
    W = boundary_word(n)
    found = {}

    def add(images, inverse_images, provenance):
        if images not in found:
            found[images] = MarkedAutomorphism(n, images, inverse_images, provenance)

    add(identity_images(n), identity_images(n), "identity")
    for name, imgs, inv_imgs in _named_moves(n):
        add(imgs, inv_imgs, name)

    # depth 1: single type-II moves fixing W
    keys = list(_iter_whitehead_keys(n))
    images_of_W = {}
    for v, cut in keys:
        u = _apply_whitehead_to_word(n, v, cut, W)
        images_of_W[(v, cut)] = u
        if u == W:
            iv, icut = _whitehead_inverse_key(v, cut)
            add(_whitehead_images(n, v, cut), _whitehead_images(n, iv, icut),
                f"whitehead(v={v})")

    if depth == 2:
        by_word = {}
        for key, u in images_of_W.items():
            by_word.setdefault(u, []).append(key)
        for key2 in keys:
            inv2 = _whitehead_inverse_key(*key2)
            target = images_of_W[inv2]
            for key1 in by_word.get(target, ()):  # phi1(W) = phi2^-1(W)
                imgs1 = _whitehead_images(n, *key1)
                imgs2 = _whitehead_images(n, *key2)
                comp = compose_images(imgs2, imgs1)
                if apply_images(comp, W) != W:
                    continue
                inv1 = _whitehead_inverse_key(*key1)
                comp_inv = compose_images(_whitehead_images(n, *inv1),
                                          _whitehead_images(n, *inv2))
                add(comp, comp_inv, f"whitehead2(v={key2[0]},v={key1[0]})")
        # composites with one signed-permutation factor
        for key, u in images_of_W.items():
            imgs_t = _whitehead_images(n, *key)
            inv_key = _whitehead_inverse_key(*key)
            imgs_t_inv = _whitehead_images(n, *inv_key)
            # sigma o tau fixes W  iff  tau(W) = sigma^-1(W)
            sigma_inv = _solve_signed_perm(W, u, n)
            if sigma_inv is not None:
                sigma = _signed_perm_inverse(sigma_inv)
                add(compose_images(sigma, imgs_t),
                    compose_images(imgs_t_inv, sigma_inv),
                    f"perm*whitehead(v={key[0]})")
            # tau o sigma fixes W  iff  sigma(W) = tau^-1(W)
            sigma2 = _solve_signed_perm(W, images_of_W[inv_key], n)
            if sigma2 is not None:
                add(compose_images(imgs_t, sigma2),
                    compose_images(_signed_perm_inverse(sigma2), imgs_t_inv),
                    f"whitehead*perm(v={key[0]})")

    moves = sorted(found.values(), key=lambda a: a.images)
    return tuple(moves)


def abelianized_matrix(phi: MarkedAutomorphism) -> np.ndarray:
    """Integer 2n x 2n matrix of the automorphism on the abelianization."""
    n = phi.n
    mat = np.zeros((2 * n, 2 * n), dtype=np.int64)
    for j, w in enumerate(phi.images):
        for l in w:
            mat[abs(l) - 1, j] += 1 if l > 0 else -1
    return mat


def mixes_handles(phi: MarkedAutomorphism) -> bool:
    """True if the abelianized matrix has a nonzero entry off the 2x2 handle blocks."""
    mat = abelianized_matrix(phi)
    n = phi.n
    for r in range(2 * n):
        for c in range(2 * n):
            if r // 2 != c // 2 and mat[r, c] != 0:
                return True
    return False


@dataclass(frozen=True)
class CompiledMove:
    """A marked automorphism evaluated on G-tuples by word substitution."""

    n: int
    images: tuple
    provenance: str
    letters: np.ndarray  # (2n, max_len) signed letters, 0-padded
    lengths: np.ndarray  # (2n,)

    def apply(self, G: FiniteGroup, entries) -> tuple:
        out = []
        for w in self.images:
            acc = G.identity
            for l in w:
                e = entries[l - 1] if l > 0 else G.inv(entries[-l - 1])
                acc = G.mul(acc, e)
            out.append(acc)
        return tuple(out)


def evaluate_word(G: FiniteGroup, w, entries) -> int:
    acc = G.identity
    for l in w:
        e = entries[l - 1] if l > 0 else G.inv(entries[-l - 1])
        acc = G.mul(acc, e)
    return acc


def boundary_eval(G: FiniteGroup, entries) -> int:
    """Evaluate prod_i [a_i, b_i] in G; an orbit invariant of the move action."""
    acc = G.identity
    for i in range(0, len(entries), 2):
        acc = G.mul(acc, G.commutator(entries[i], entries[i + 1]))
    return acc


def compile_move(phi: MarkedAutomorphism, G: FiniteGroup, check_sample: int = 16) -> CompiledMove:
    """Compile image words to padded letter arrays; spot-check boundary preservation."""
    two_n = 2 * phi.n
    max_len = max((len(w) for w in phi.images), default=1) or 1
    letters = np.zeros((two_n, max_len), dtype=np.int16)
    lengths = np.zeros(two_n, dtype=np.int16)
    for j, w in enumerate(phi.images):
        lengths[j] = len(w)
        letters[j, :len(w)] = w
    move = CompiledMove(phi.n, phi.images, phi.provenance, letters, lengths)
    rng = np.random.default_rng(0)
    for _ in range(check_sample):
        v = tuple(int(x) for x in rng.integers(0, G.order, size=two_n))
        if boundary_eval(G, move.apply(G, v)) != boundary_eval(G, v):
            raise WordError(f"{phi.provenance}: compiled move broke the boundary value")
    return move


def compile_moves(n: int, G: FiniteGroup, depth: int = 1) -> tuple:
    return tuple(compile_move(phi, G) for phi in enumerate_stabilizing_automorphisms(n, depth))


def moveset_hash(moves) -> str:
    """Content hash over the sorted image-word tuples."""
    payload = sorted(m.images for m in moves)
    blob = json.dumps(payload, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def moveset_manifest(n: int, moves) -> dict:
    return {
        "n": n,
        "moves": [
            {"provenance": m.provenance, "images": [list(w) for w in m.images]}
            for m in moves
        ],
        "hash": moveset_hash(moves),
    }
