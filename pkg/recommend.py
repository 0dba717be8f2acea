from gravrec.script import recommend

if __name__ == "__main__":
    recommend.main()
