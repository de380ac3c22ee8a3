"""A guided tour of the generator: seed it, draw from it, reseed it.

Run:  python3 demos/01_generate.py
"""

from drbglab.drbg import (
    GenerateRequest,
    ReseedRequired,
    generate,
    generate_with_entropy,
    instantiate,
    reseed,
)
from drbglab.entropy import DeterministicStream, take

# A deterministic entropy stream makes every run of this script print
# the same bytes. Swap in SystemStream() for real OS entropy.
stream = DeterministicStream(bytes(range(96)))

seed, stream = take(stream, 32)
state = instantiate(seed, nonce=b"demo-nonce", personalization=b"demo")
print(f"instantiated: reseed_counter={state.reseed_counter}")

# Every call returns the output AND the successor state; nothing is
# mutated. Losing the new state means replaying old output.
out1, state = generate(state, GenerateRequest(out_len=32))
out2, state = generate(state, GenerateRequest(out_len=32))
print(f"call 1: {out1.hex()}")
print(f"call 2: {out2.hex()}")
print(f"reseed_counter is now {state.reseed_counter}")

# Additional input stirs caller-provided data into the state before
# the call and is absorbed again afterwards.
out3, state = generate(state, GenerateRequest(32, additional_input=b"label-7"))
print(f"call 3 (with additional input): {out3.hex()}")

# Reseeding mixes fresh entropy and resets the call counter.
fresh, stream = take(stream, 32)
state = reseed(state, fresh)
print(f"after reseed: reseed_counter={state.reseed_counter}")

# A state that has exhausted its reseed interval refuses to generate:
tired = instantiate(b"\x42" * 32, reseed_interval=1)
_, tired = generate(tired, GenerateRequest(8))
try:
    generate(tired, GenerateRequest(8))
except ReseedRequired as exc:
    print(f"second call without reseed: refused ({exc})")

# generate_with_entropy drives that loop for you: whenever the state
# needs entropy (prediction resistance, or the interval ran out), it
# takes the next seed from the stream and reseeds first.
pr_state = instantiate(
    b"\x24" * 32, prediction_resistance=True, entropy_len=32
)
pr_stream = DeterministicStream(bytes(range(64)))
for call in range(2):
    out, pr_stream, pr_state = generate_with_entropy(
        pr_stream, pr_state, GenerateRequest(16)
    )
    print(f"prediction-resistant call {call}: {out.hex()}")
print(f"entropy remaining in the stream: {len(pr_stream)} octets")
