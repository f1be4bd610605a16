#!/usr/bin/env python
# Exploit Title: ElasticSearch 1.3.0 < 1.3.7 / 1.4.0 < 1.4.2 - Remote Code Execution
# EDB-ID: 36337
# Offline fixture. Placeholder body: the original proof-of-concept code is not included.

print('placeholder')
