"""
Quasi-random hopping sequences
==============================

Two users from the small 15-channel example: user 1 sees channels 0..6, user
2 sees 6..10. Each picks a random ID channel, builds its codeword, and
interleaves modular clocks over its own channels.
"""
import numpy as np

from qrendezvous.hopping import ChannelSet, MultiRadioUser, QrUserState

set1 = ChannelSet.of(range(7), 15)
set2 = ChannelSet.of(range(6, 11), 15)

su1 = QrUserState.create(set1, seed=1, id_channel=1)
su2 = QrUserState.create(set2, seed=2, id_channel=6)
print("SU1", su1.codeword, "primes", su1.p0, su1.p1)
print("SU2", su2.codeword, "primes", su2.p0, su2.p1)

# first three frames; column t holds slot t
x1 = su1.block(0, 3 * su1.M)[0]
x2 = su2.block(3, 3 * su2.M)[0]   # SU2 runs three slots ahead
print("SU1:", x1)
print("SU2:", x2)
print("meetings at global slots", np.flatnonzero(x1 == x2))

# slot t = 0, M, 2M, ... is always the ID channel
print(x1[::su1.M])

# Within one frame the channels look uniform: 20000 fresh generators
M = su1.M
frames = np.array([QrUserState.create(set1, seed=s).block(0, M)[0] for s in range(20_000)])
print(np.stack([np.bincount(frames[:, t], minlength=7) for t in range(M)]))

# Multiple radios: the channels are dealt round robin and each cell gets its
# own quasi-random generator
user = MultiRadioUser.create(ChannelSet.of(range(0, 160, 4), 160), m=4, seed=3)
print([r.channels.n for r in user.radios])
print(user.block(0, 8))
