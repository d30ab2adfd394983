extern bool FA;
extern bool FB;
extern bool FC;
extern bool FD;
extern bool FE;

int sig9 = 0;
extern int sig8;

int act8() {
    return 8;
}

int poll8() {
    if (sig8 > 0) {
        act8();
    }
    return 0;
}

int send9() {
    if (FD) {
        sig9 = sig9 + 1;
    }
    return 0;
}
