#!/usr/bin/env python3
# Independent numpy evaluation of the encoder-decoder forward pass for the
# tiny fixture in tests/unit/test_model.cpp. Every parameter value, in
# tensor visit order and row-major within a tensor, is 0.5*sin(k) for
# k = 1, 2, ...
#
# Run: python3 tests/oracles/tiny_forward.py

import numpy as np

SRC_V, TGT_V, E, H = 5, 4, 2, 2
BOS, EOS = 1, 2


def shapes():
    gru = lambda prefix, inp: [
        (prefix + ".w_z", (H, inp)), (prefix + ".w_r", (H, inp)), (prefix + ".w_h", (H, inp)),
        (prefix + ".u_z", (H, H)), (prefix + ".u_r", (H, H)), (prefix + ".u_h", (H, H)),
        (prefix + ".b_z", (H,)), (prefix + ".b_r", (H,)), (prefix + ".b_h", (H,)),
    ]
    return ([("src_embed", (SRC_V, E)), ("tgt_embed", (TGT_V, E))]
            + gru("enc_fwd", E) + gru("enc_bwd", E) + gru("dec", E + 2 * H)
            + [("att_w", (H, H)), ("att_u", (H, 2 * H)), ("att_v", (H,)),
               ("init_w", (H, H)), ("init_b", (H,)),
               ("out_w", (TGT_V, 3 * H)), ("out_b", (TGT_V,))])


def build():
    params, k = {}, 0
    for name, shape in shapes():
        n = int(np.prod(shape))
        vals = 0.5 * np.sin(np.arange(k + 1, k + n + 1, dtype=np.float64))
        params[name] = vals.reshape(shape)
        k += n
    return params


def sig(x):
    return 1.0 / (1.0 + np.exp(-x))


def gru(p, pre, x, h):
    z = sig(p[pre + ".w_z"] @ x + p[pre + ".u_z"] @ h + p[pre + ".b_z"])
    r = sig(p[pre + ".w_r"] @ x + p[pre + ".u_r"] @ h + p[pre + ".b_r"])
    c = np.tanh(p[pre + ".w_h"] @ x + p[pre + ".u_h"] @ (r * h) + p[pre + ".b_h"])
    return (1 - z) * h + z * c


def run(source, prefix):
    p = build()
    xs = [p["src_embed"][t] for t in source]
    fwd, h = [], np.zeros(H)
    for x in xs:
        h = gru(p, "enc_fwd", x, h)
        fwd.append(h)
    bwd, h = [None] * len(xs), np.zeros(H)
    for j in reversed(range(len(xs))):
        h = gru(p, "enc_bwd", xs[j], h)
        bwd[j] = h
    ann = [np.concatenate([fwd[j], bwd[j]]) for j in range(len(xs))]
    s = np.tanh(p["init_w"] @ bwd[0] + p["init_b"])
    out, prev = [], BOS
    for i in range(len(prefix) + 1):
        e = np.array([p["att_v"] @ np.tanh(p["att_w"] @ s + p["att_u"] @ a) for a in ann])
        alpha = np.exp(e - e.max())
        alpha /= alpha.sum()
        ctx = sum(a_j * h_j for a_j, h_j in zip(alpha, ann))
        s = gru(p, "dec", np.concatenate([p["tgt_embed"][prev], ctx]), s)
        logits = p["out_w"] @ np.concatenate([s, ctx]) + p["out_b"]
        probs = np.exp(logits - logits.max())
        out.append(probs / probs.sum())
        if i < len(prefix):
            prev = prefix[i]
    return out


if __name__ == "__main__":
    for step, dist in enumerate(run([4, 3], [3])):
        print(f"step{step}", ", ".join(repr(float(v)) for v in dist))
