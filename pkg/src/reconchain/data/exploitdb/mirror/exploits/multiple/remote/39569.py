#!/usr/bin/env python
# Exploit Title: OpenSSH 7.2p1 - (Authenticated) xauth Command Injection
# EDB-ID: 39569
# Offline fixture. Placeholder body: the original proof-of-concept code is not included.

print('placeholder')
