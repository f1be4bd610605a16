#!/usr/bin/env python
# Exploit Title: OpenSSH 7.2p2 - Username Enumeration
# EDB-ID: 40136
# Offline fixture. Placeholder body: the original proof-of-concept code is not included.

print('placeholder')
