"""The 128 largest primes below 2**62, in decreasing order."""

PRIMES_62 = (
    0x3fffffffffffffc7, 0x3fffffffffffffa9, 0x3fffffffffffff8b,
    0x3fffffffffffff71, 0x3fffffffffffff67, 0x3fffffffffffff59,
    0x3fffffffffffff55, 0x3fffffffffffff3d, 0x3fffffffffffff35,
    0x3ffffffffffffeef, 0x3ffffffffffffee1, 0x3ffffffffffffec3,
    0x3ffffffffffffe45, 0x3ffffffffffffe1d, 0x3ffffffffffffe11,
    0x3ffffffffffffdc1, 0x3ffffffffffffdbb, 0x3ffffffffffffda5,
    0x3ffffffffffffd87, 0x3ffffffffffffd69, 0x3ffffffffffffd03,
    0x3ffffffffffffcfb, 0x3ffffffffffffcf7, 0x3ffffffffffffce9,
    0x3ffffffffffffcd3, 0x3ffffffffffffcc1, 0x3ffffffffffffc65,
    0x3ffffffffffffc2b, 0x3ffffffffffffc1f, 0x3ffffffffffffc17,
    0x3ffffffffffffc11, 0x3ffffffffffffc07, 0x3ffffffffffffb53,
    0x3ffffffffffffb27, 0x3ffffffffffffaf3, 0x3ffffffffffffab7,
    0x3ffffffffffffa67, 0x3ffffffffffffa15, 0x3ffffffffffff9ef,
    0x3ffffffffffff9d9, 0x3ffffffffffff9d3, 0x3ffffffffffff9c5,
    0x3ffffffffffff9af, 0x3ffffffffffff977, 0x3ffffffffffff95f,
    0x3ffffffffffff95b, 0x3ffffffffffff959, 0x3ffffffffffff8e1,
    0x3ffffffffffff8a7, 0x3ffffffffffff889, 0x3ffffffffffff87d,
    0x3ffffffffffff805, 0x3ffffffffffff7e7, 0x3ffffffffffff7c9,
    0x3ffffffffffff7a3, 0x3ffffffffffff775, 0x3ffffffffffff757,
    0x3ffffffffffff739, 0x3ffffffffffff713, 0x3ffffffffffff6d1,
    0x3ffffffffffff6c1, 0x3ffffffffffff6b9, 0x3ffffffffffff6a3,
    0x3ffffffffffff68b, 0x3ffffffffffff631, 0x3ffffffffffff613,
    0x3ffffffffffff5e9, 0x3ffffffffffff59b, 0x3ffffffffffff58d,
    0x3ffffffffffff53f, 0x3ffffffffffff527, 0x3ffffffffffff517,
    0x3ffffffffffff4d3, 0x3ffffffffffff4b5, 0x3ffffffffffff491,
    0x3ffffffffffff431, 0x3ffffffffffff41f, 0x3ffffffffffff36b,
    0x3ffffffffffff34d, 0x3ffffffffffff349, 0x3ffffffffffff347,
    0x3ffffffffffff341, 0x3ffffffffffff30b, 0x3ffffffffffff2cf,
    0x3ffffffffffff23f, 0x3ffffffffffff22f, 0x3ffffffffffff227,
    0x3ffffffffffff221, 0x3ffffffffffff215, 0x3ffffffffffff1a9,
    0x3ffffffffffff187, 0x3ffffffffffff149, 0x3ffffffffffff12b,
    0x3ffffffffffff125, 0x3ffffffffffff0df, 0x3ffffffffffff0a3,
    0x3fffffffffffefbd, 0x3fffffffffffef69, 0x3fffffffffffef4d,
    0x3fffffffffffef33, 0x3fffffffffffeee7, 0x3fffffffffffeecd,
    0x3fffffffffffee7b, 0x3fffffffffffee33, 0x3fffffffffffee0d,
    0x3fffffffffffeddf, 0x3fffffffffffedcb, 0x3fffffffffffed9d,
    0x3fffffffffffed53, 0x3fffffffffffed31, 0x3fffffffffffed2b,
    0x3fffffffffffed07, 0x3fffffffffffecef, 0x3fffffffffffeccb,
    0x3fffffffffffecb3, 0x3fffffffffffec95, 0x3fffffffffffec81,
    0x3fffffffffffec7b, 0x3fffffffffffec75, 0x3fffffffffffec41,
    0x3fffffffffffec11, 0x3fffffffffffebf3, 0x3fffffffffffebdf,
    0x3fffffffffffeb6f, 0x3fffffffffffeb15, 0x3fffffffffffeaef,
    0x3fffffffffffeabb, 0x3fffffffffffeaa7,
)
