"""
CLI サブコマンドの実装
"""
